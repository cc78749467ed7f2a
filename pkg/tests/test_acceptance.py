"""The acceptance suite: every criterion at its stated tolerance, one
pass/fail line printed per criterion.

Exactness conventions: "exactly" means a ProvedZero verdict from the
canonical-form decision procedure; the transcendental flow entry is
accepted in sampling mode with 25 points at tolerance 1e-9.
"""

import random

import pytest
import sympy as sp

from njk.algebroids import (
    BundleMapU,
    check_lie_algebroid,
    deformed_structure,
)
from njk.catalog import (
    GROUPOID_ENTRIES,
    OPERATOR_ENTRIES,
    build,
)
from njk.cli import RunReport, TaskResult, render_machine, run_document
from njk.dsl import parse_document
from njk.graded import theorem1_check
from njk.groupoids import (
    algebroid_of,
    cochain_is_zero,
    delta_0,
    delta_minus1,
    lemma_check,
    multiplicative_check,
    theorem2_check,
)
from njk.scalars import Config, var
from njk.tensors import Chart, VVForm, fn_bracket, nijenhuis_torsion, vvform_is_zero

CFG = Config(seed=2026)
FLOW_CFG = Config(seed=2026, samples=25, tol=1e-9)


def _line(number: int, ok: bool, text: str) -> None:
    print(f"ACCEPTANCE {number:2d}: {'PASS' if ok else 'FAIL'} - {text}")
    assert ok, text


@pytest.fixture(scope="module")
def groupoid_entries():
    return {name: build(name) for name in GROUPOID_ENTRIES}


@pytest.fixture(scope="module")
def theorem2_results(groupoid_entries):
    out = {}
    for name, entry in groupoid_entries.items():
        cfg = entry.tuned(CFG)
        out[name] = theorem2_check(entry.presentation, entry.bundle_map, cfg)
    return out


@pytest.fixture(scope="module")
def operator_entries():
    return {name: build(name) for name in OPERATOR_ENTRIES}


def test_criterion_1_torsion_fn_oracle():
    rng = random.Random(CFG.seed)
    charts = [Chart.make("A2", "x y"), Chart.make("A3", "x y z")]

    def poly(chart):
        e = sp.Integer(rng.randint(-3, 3))
        for _ in range(2):
            e = e + sp.Rational(rng.randint(-4, 4), rng.randint(1, 3)) * rng.choice(chart.coords) ** rng.randint(1, 2)
        return e

    count = 0
    for k in range(20):
        chart = charts[k % 2]
        N = VVForm.tensor11(
            chart,
            [[poly(chart) for _ in range(chart.dim)] for _ in range(chart.dim)],
        )
        diff = nijenhuis_torsion(N) - fn_bracket(N, N) * sp.Rational(1, 2)
        res = vvform_is_zero(diff, CFG)
        assert res.verdict == "ProvedZero"
        count += 1
    _line(1, count >= 20, f"T_N = (1/2)[N,N]^fn ProvedZero for {count} random tensors")


def test_criterion_2_algebroid_soundness(operator_entries):
    ok = True
    for name, entry in operator_entries.items():
        torsion = vvform_is_zero(nijenhuis_torsion(entry.operator), CFG)
        axioms = check_lie_algebroid(deformed_structure(entry.operator), CFG).combined
        if not (torsion.verdict == "ProvedZero" and axioms.verdict == "ProvedZero"):
            ok = False
    broken = build("broken_nijenhuis")
    torsion = vvform_is_zero(nijenhuis_torsion(broken.operator), CFG)
    axioms = check_lie_algebroid(deformed_structure(broken.operator), CFG).combined
    matches = torsion.verdict == "ProvedNonzero" and axioms.verdict == "ProvedNonzero"
    _line(2, ok and matches, "deformed structures sound for catalog operators, fail for the control")


def test_criterion_3_theorem1_both_forms(operator_entries):
    ok = True
    for name, entry in operator_entries.items():
        A = deformed_structure(entry.operator)
        report = theorem1_check(A, entry.operator_U, CFG)
        for key in ("theorem1_form1", "theorem1_form2", "lift_identity"):
            if report.get(key).verdict != "ProvedZero":
                ok = False
    broken = build("broken_nijenhuis")
    report = theorem1_check(deformed_structure(broken.operator), broken.operator_U, CFG)
    both_fail = (
        report.get("theorem1_form1").verdict == "ProvedNonzero"
        and report.get("theorem1_form2").verdict == "ProvedNonzero"
    )
    lift = report.get("lift_identity").verdict == "ProvedZero"
    _line(3, ok and both_fail and lift,
          "both theorem-1 forms ProvedZero on catalog operators, ProvedNonzero on the control")


def test_criterion_4_euler_proposition():
    from njk.graded import GradedChart, euler_check, homological_field_on

    ok = True
    for n in range(1, 5):
        chart = GradedChart.make(
            f"E{n}", " ".join(f"x{i}" for i in range(n)), " ".join(f"dx{i}" for i in range(n))
        )
        report = euler_check(chart)
        if report.get("iota_dR_V_equals_euler").verdict != "ProvedZero":
            ok = False
    # forcing direction on a supplied fields with scaled and identity anchors
    M2 = Chart.make("E2b", "x y")
    chart = GradedChart.make("E2g", "x y", "dx dy")
    two = VVForm.tensor11(M2, [[2, 0], [0, 2]])
    rep2 = euler_check(chart, homological_field_on(deformed_structure(two), chart))
    ident = VVForm.identity(M2)
    rep1 = euler_check(chart, homological_field_on(deformed_structure(ident), chart))
    forcing = (
        not rep2.get("iota_Q_V_equals_euler").holds
        and rep2.get("forcing[iota-condition iff anchor=I]").holds
        and rep1.get("iota_Q_V_equals_euler").verdict == "ProvedZero"
        and rep1.get("forcing[iota-condition iff anchor=I]").holds
    )
    _line(4, ok and forcing, "Euler contraction exact in dims 1-4 and the anchor forcing direction")


EXPECTED_VERDICT = {
    "flow_groupoid": ("ProvedZero", "SampledZero"),
    "default": ("ProvedZero",),
}

T2_KEYS = (
    "axioms",
    "im_in_ker_ds[ds o rightlift = 0]",
    "tker_in_ker[rightlift o ker dt = 0]",
    "rank[rank rightlift = dim M]",
    "fn_self_bracket[rightlift Nijenhuis]",
    "s_projection[delta U s-related]",
    "t_projection[delta U t-related]",
    "projections_agree[s = t]",
    "torsion_of_N",
)


def test_criterion_5_theorem2_end_to_end(groupoid_entries, theorem2_results):
    ok = True
    for name in GROUPOID_ENTRIES:
        allowed = EXPECTED_VERDICT.get(name, EXPECTED_VERDICT["default"])
        result = theorem2_results[name]
        for key in T2_KEYS:
            verdict = result.report.get(key).verdict
            if verdict not in allowed:
                ok = False
        entry = groupoid_entries[name]
        res = vvform_is_zero(result.delta - entry.expected["delta_U"], entry.tuned(CFG))
        if res.verdict not in allowed:
            ok = False
    # sixth display: the pre-Lie groupoid's delta U regression
    prelie = build("prelie")
    pre_result = theorem2_check(prelie.presentation, prelie.bundle_map, CFG)
    res = vvform_is_zero(pre_result.delta - prelie.expected["delta_U"], CFG)
    if res.verdict != "ProvedZero" or not pre_result.report.passed:
        ok = False
    _line(5, ok, "theorem 2 conditions and delta-U regressions on all five groupoids (+ pre-Lie)")


def test_criterion_6_lemma(groupoid_entries, operator_entries):
    ok = True
    for name in ("pair_groupoid", "double_tangent", "projection_groupoid"):
        entry = groupoid_entries[name]
        report = lemma_check(entry.presentation, entry.bundle_map, CFG)
        for item in report.items:
            if item.result.verdict != "ProvedZero":
                ok = False
    for name, entry in operator_entries.items():
        A = deformed_structure(entry.operator)
        report = theorem1_check(A, entry.operator_U, CFG)
        if report.get("lift_identity").verdict != "ProvedZero":
            ok = False
    prelie = build("prelie")
    report = theorem1_check(prelie.algebroid, BundleMapU.identity(2), CFG)
    if report.get("lift_identity").verdict != "ProvedZero":
        ok = False
    _line(6, ok, "lemma identity on frame sections and its graded half, exactly")


def test_criterion_7_delta_squared_and_multiplicativity(groupoid_entries, theorem2_results):
    ok = True
    for name in GROUPOID_ENTRIES:
        entry = groupoid_entries[name]
        cfg = entry.tuned(CFG)
        allowed = EXPECTED_VERDICT.get(name, EXPECTED_VERDICT["default"])
        dU = theorem2_results[name].delta
        cochain, _ = delta_0(entry.presentation, dU, cfg)
        if cochain_is_zero(cochain, cfg).verdict not in allowed:
            ok = False
        if not multiplicative_check(entry.presentation, dU, cfg).passed:
            ok = False
        if not multiplicative_check(
            entry.presentation, VVForm.identity(entry.presentation.G), cfg
        ).passed:
            ok = False
    pair = groupoid_entries["pair_groupoid"]
    mutated = VVForm(pair.presentation.G, 1, {((0,), 0): pair.presentation.G.coords[0]})
    report = multiplicative_check(pair.presentation, mutated, CFG)
    failing = [i for i in report.items if not i.result.holds]
    witnessed = bool(failing) and all(
        i.result.note or i.result.witness for i in failing
    )
    _line(7, ok and witnessed,
          "delta^2 = 0 and multiplicativity of delta U and identity; mutated tensor refused with witness")


def test_criterion_8_a_torsion_lift(groupoid_entries, theorem2_results):
    from njk.algebroids import a_torsion
    from njk.scalars import canonical

    ok = True
    for name in GROUPOID_ENTRIES:
        allowed = EXPECTED_VERDICT.get(name, EXPECTED_VERDICT["default"])
        if theorem2_results[name].report.get(
            "a_torsion_lift[T_rightlift = rightlift(T^A_U)]"
        ).verdict not in allowed:
            ok = False
    prelie = build("prelie")
    pre_result = theorem2_check(prelie.presentation, prelie.bundle_map, CFG)
    if pre_result.report.get("a_torsion_lift[T_rightlift = rightlift(T^A_U)]").verdict != "ProvedZero":
        ok = False
    T = a_torsion(prelie.algebroid, BundleMapU.identity(2))
    if any(canonical(c) != 0 for c in T.entries()):
        ok = False
    _line(8, ok, "T_rightlift = rightlift(T^A_U) on all groupoids; pre-Lie A-torsion vanishes")


def test_criterion_9_canonical_class(groupoid_entries):
    pair = groupoid_entries["pair_groupoid"]
    dU = delta_minus1(pair.presentation, pair.bundle_map, CFG)
    res = vvform_is_zero(dU - VVForm.identity(pair.presentation.G), CFG)
    _line(9, res.verdict == "ProvedZero", "delta(I_M) is exactly the identity of T(M x M)")


DOC = """
chart M : x y
vvform N on M degree 1 : (x|x) = 1 + x^2 ; (y|y) = y^3
algebroid TA on M rank 2 : rho(x|1) = 1 ; rho(y|2) = 1
bundlemap W : M rank 2 : (1|x) = 1 ; (2|y) = 1
task torsion N
task theorem1 TA W
task catalog flow_groupoid
"""


def test_criterion_10_determinism():
    doc = parse_document(DOC)
    cfg = Config(seed=99, samples=25, tol=1e-9)
    a = render_machine(run_document(doc, cfg))
    b = render_machine(run_document(parse_document(DOC), cfg))
    _line(10, a == b, "byte-identical machine reports for identical inputs and seed")

import random

import pytest
import sympy as sp

from njk.algebroids import (
    AlgebroidData,
    BundleMapU,
    IMTriple,
    deformed_structure,
    im_check,
    lemma_triple,
    tangent_lift_triple,
)
from njk.graded import (
    GradedChart,
    GradedFunction,
    GradedTensor11,
    GradedVectorField,
    check_homological,
    core_lift,
    de_rham_field,
    de_rham_field_identified,
    euler_check,
    euler_field,
    graded_chart_of,
    graded_commutator,
    graded_fn_11,
    graded_lie_derivative,
    gt_is_zero,
    gvf_is_zero,
    homological_field,
    homological_field_on,
    linear_lift,
    theorem1_check,
    vertical_endomorphism,
    vv2_is_zero,
)
from njk.algebroids import check_lie_algebroid
from njk.scalars import ZERO, canonical, var
from njk.tensors import Chart, VVForm, fn_bracket

M2 = Chart.make("M2", "x1 x2")
x1, x2 = M2.coords


def diag_operator():
    return VVForm.tensor11(M2, [[1 + x1**2, ZERO], [ZERO, x2**3]])


def broken_operator():
    return VVForm.tensor11(M2, [[x2, ZERO], [ZERO, ZERO]])


def abelian_algebroid():
    return deformed_structure(VVForm.tensor11(M2, [[ZERO, ZERO], [ZERO, ZERO]]), "abelian2")


def heisenberg_algebroid():
    # valid algebroid with zero anchor and constant nonzero bracket:
    # not of deformed type
    return AlgebroidData("heis", M2, 2, [[ZERO, ZERO], [ZERO, ZERO]], {(0, 1): (sp.Integer(1), ZERO)})


# -- graded functions ----------------------------------------------------------


def test_graded_function_anticommutativity():
    ch = GradedChart.make("g", "x1 x2", "w1 w2")
    w1 = GradedFunction.odd_coord(ch, 0)
    w2 = GradedFunction.odd_coord(ch, 1)
    assert (w1.mul(w2) + w2.mul(w1)).is_zero_fun()
    assert w1.mul(w1).is_zero_fun()


def test_graded_function_odd_derivative_signs():
    ch = GradedChart.make("g", "x1", "w1 w2")
    f = GradedFunction(ch, {(0, 1): sp.Integer(1)})  # w1 w2
    assert f.diff_odd(0).table == {(1,): sp.Integer(1)}
    assert f.diff_odd(1).table == {(0,): sp.Integer(-1)}


# -- homological fields --------------------------------------------------------


def test_homological_field_abelian_is_zero():
    assert homological_field(abelian_algebroid()).is_zero_field()


def test_homological_field_tangent_is_de_rham():
    tangent = deformed_structure(VVForm.identity(M2), "TM2")
    Q = homological_field(tangent)
    d = de_rham_field(Q.chart)
    assert gvf_is_zero(Q - d).holds


def test_homological_field_components_of_diag():
    N = diag_operator()
    A = deformed_structure(N)
    Q = homological_field(A)
    m = N.matrix()
    for i in range(2):
        for j in range(2):
            assert canonical(Q.xcomp[i].table.get((j,), ZERO) - m[i][j]) == 0
    # c vanishes for diag(f(x1), g(x2))
    assert all(f.is_zero_fun() for f in Q.ocomp)


def test_de_rham_self_commutator_vanishes():
    ch = GradedChart.make("g", "x1 x2", "dx1 dx2")
    d = de_rham_field(ch)
    assert graded_commutator(d, d).is_zero_field()


def test_dr_commutes_for_torsion_free_catalog_operator():
    A = deformed_structure(diag_operator())
    Q = homological_field(A)
    d = de_rham_field(Q.chart)
    assert gvf_is_zero(graded_commutator(d, Q)).holds


def test_dr_commutator_nonzero_for_non_deformed_type():
    A = heisenberg_algebroid()
    Q = homological_field(A)
    W = de_rham_field_identified(Q.chart, BundleMapU.identity(2))
    assert gvf_is_zero(graded_commutator(W, Q)).verdict == "ProvedNonzero"


def test_check_homological_agrees_with_axioms():
    for A in (deformed_structure(diag_operator()), deformed_structure(broken_operator()),
              heisenberg_algebroid(), abelian_algebroid()):
        hom = check_homological(homological_field(A))
        axioms = check_lie_algebroid(A)
        assert hom.holds == axioms.passed


# -- vertical endomorphism and lifts --------------------------------------------


def test_vertical_endomorphism_blocks():
    ch = GradedChart.make("g", "x", "dx")
    V = vertical_endomorphism(ch)
    assert set(V.blocks) == {(1, 0)}
    assert V.blocks[(1, 0)].table == {(): sp.Integer(1)}


def test_vertical_endomorphism_squares_to_zero():
    ch = GradedChart.make("g", "x1 x2", "dx1 dx2")
    V = vertical_endomorphism(ch)
    assert V.compose(V).is_zero_tensor()


def test_core_lift_of_identity_is_vertical():
    ch = GradedChart.make("g", "x1 x2", "dx1 dx2")
    assert gt_is_zero(core_lift(ch, BundleMapU.identity(2)) - vertical_endomorphism(ch)).holds


def test_core_lift_zero():
    ch = GradedChart.make("g", "x1 x2", "dx1 dx2")
    U = BundleMapU.make([[ZERO, ZERO], [ZERO, ZERO]])
    assert core_lift(ch, U).is_zero_tensor()


def test_core_lift_invertibility_detection():
    from njk.graded import almost_tangent_check

    ch = GradedChart.make("g", "x1 x2", "dx1 dx2")
    good = almost_tangent_check(core_lift(ch, BundleMapU.make([[1, x1], [ZERO, 1 + x2**2]])))
    assert good.passed
    bad = almost_tangent_check(core_lift(ch, BundleMapU.make([[1, x1], [x2, x1 * x2]])))
    assert not bad.passed


# -- graded Lie derivative -------------------------------------------------------


def test_lie_derivative_of_vertical_along_de_rham_is_identity_lift():
    tangent = deformed_structure(VVForm.identity(M2), "TM2")
    ch = graded_chart_of(tangent)
    Q = de_rham_field(ch)
    V = vertical_endomorphism(ch)
    K = graded_lie_derivative(Q, V)
    lift = linear_lift(ch, IMTriple.identity(tangent))
    assert gt_is_zero(K - lift).holds


def test_eq_L_dV_on_catalog_operator():
    N = diag_operator()
    A = deformed_structure(N)
    ch = graded_chart_of(A)
    Q = homological_field_on(A, ch)
    V = vertical_endomorphism(ch)
    K = graded_lie_derivative(Q, V)
    lift = linear_lift(ch, tangent_lift_triple(N))
    assert gt_is_zero(K - lift).verdict == "ProvedZero"


def test_lie_derivative_of_zero_tensor():
    A = deformed_structure(diag_operator())
    ch = graded_chart_of(A)
    Q = homological_field_on(A, ch)
    Z = GradedTensor11(ch, 0, {})
    assert graded_lie_derivative(Q, Z).is_zero_tensor()


# -- linear lift -----------------------------------------------------------------


def test_linear_lift_zero_and_identity():
    A = deformed_structure(diag_operator())
    ch = graded_chart_of(A)
    assert linear_lift(ch, IMTriple.zero(A)).is_zero_tensor()
    ident = linear_lift(ch, IMTriple.identity(A))
    expect = GradedTensor11(
        ch,
        0,
        {(c, c): GradedFunction.scalar(ch, sp.Integer(1)) for c in range(4)},
    )
    assert gt_is_zero(ident - expect).holds


def test_im_iff_lift_closed():
    # IM property of a triple <=> L_{d_A} lift = 0
    for N in (diag_operator(), broken_operator()):
        A = deformed_structure(N)
        triple = tangent_lift_triple(N)
        ch = graded_chart_of(A)
        Q = homological_field_on(A, ch)
        lift = linear_lift(ch, triple)
        graded_zero = gt_is_zero(graded_lie_derivative(Q, lift)).holds
        assert graded_zero == im_check(A, triple).passed


# -- graded FN bracket -----------------------------------------------------------


def test_vertical_self_bracket_vanishes():
    ch = GradedChart.make("g", "x1 x2", "dx1 dx2")
    V = vertical_endomorphism(ch)
    assert vv2_is_zero(graded_fn_11(V, V)).holds


def test_vvq_bracket_zero_for_catalog_nonzero_for_heisenberg():
    A = deformed_structure(diag_operator())
    ch = graded_chart_of(A)
    Q = homological_field_on(A, ch)
    V = vertical_endomorphism(ch)
    K = graded_lie_derivative(Q, V)
    assert vv2_is_zero(graded_fn_11(K, V)).verdict == "ProvedZero"

    H = heisenberg_algebroid()
    ch2 = graded_chart_of(H)
    Q2 = homological_field_on(H, ch2)
    V2 = vertical_endomorphism(ch2)
    K2 = graded_lie_derivative(Q2, V2)
    assert vv2_is_zero(graded_fn_11(K2, V2)).verdict == "ProvedNonzero"


def test_degree0_reduction_matches_classical_fn_bracket():
    rng = random.Random(17)
    gch = GradedChart("M2[0]", M2.coords, ())

    def to_graded(T):
        m = T.matrix()
        blocks = {}
        for i in range(2):
            for j in range(2):
                if m[i][j] != 0:
                    blocks[(i, j)] = GradedFunction.scalar(gch, m[i][j])
        return GradedTensor11(gch, 0, blocks)

    def rnd():
        return VVForm.tensor11(
            M2,
            [[rng.randint(-2, 2) * x1 + rng.randint(-2, 2) * x2**2 for _ in range(2)] for _ in range(2)],
        )

    for _ in range(10):
        K, L = rnd(), rnd()
        classical = fn_bracket(K, L)
        S = graded_fn_11(to_graded(K), to_graded(L))
        for c in range(2):
            got = {T: coeff for (Sk, T, E), coeff in S.components[c].table.items()}
            for i in range(2):
                for j in range(i + 1, 2):
                    assert canonical(got.get((i, j), ZERO) - classical.coeff((i, j), c)) == 0


# -- Euler proposition -----------------------------------------------------------


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_euler_check_standard_charts(n):
    ch = GradedChart.make(
        f"g{n}", " ".join(f"x{i}" for i in range(n)), " ".join(f"dx{i}" for i in range(n))
    )
    report = euler_check(ch)
    assert report.passed
    assert report.get("iota_dR_V_equals_euler").verdict == "ProvedZero"


def test_euler_check_detects_scaled_anchor():
    ch = GradedChart.make("g", "x1 x2", "dx1 dx2")
    two = VVForm.tensor11(M2, [[2, ZERO], [ZERO, 2]])
    Q = homological_field_on(deformed_structure(two), ch)
    report = euler_check(ch, Q)
    assert not report.get("iota_Q_V_equals_euler").holds
    assert report.get("forcing[iota-condition iff anchor=I]").holds


def test_euler_check_identity_anchor_arbitrary_c():
    ch = GradedChart.make("g", "x1 x2", "dx1 dx2")
    A = AlgebroidData(
        "idc",
        M2,
        2,
        [[sp.Integer(1), ZERO], [ZERO, sp.Integer(1)]],
        {(0, 1): (x1, x2**2)},
    )
    Q = homological_field_on(A, ch)
    report = euler_check(ch, Q)
    assert report.get("iota_Q_V_equals_euler").holds
    assert report.get("anchor_is_identity").holds
    # such a Q is homological only when c gives the de Rham field
    assert check_homological(Q).verdict == "ProvedNonzero"


# -- theorem 1 -------------------------------------------------------------------


def test_theorem1_diag_all_pass():
    report = theorem1_check(deformed_structure(diag_operator()), BundleMapU.identity(2))
    assert report.passed
    for name in ("theorem1_form1", "theorem1_form2", "lift_identity"):
        assert report.get(name).verdict == "ProvedZero"


def test_theorem1_abelian_all_pass():
    report = theorem1_check(abelian_algebroid(), BundleMapU.identity(2))
    assert report.passed


def test_theorem1_broken_fails_both_forms_together():
    report = theorem1_check(deformed_structure(broken_operator()), BundleMapU.identity(2))
    f1 = report.get("theorem1_form1")
    f2 = report.get("theorem1_form2")
    assert not f1.holds and not f2.holds
    assert f1.verdict == "ProvedNonzero" and f2.verdict == "ProvedNonzero"


def test_vv2_frame_pair_evaluation():
    # contracting the component 2-forms with coordinate frame fields
    # reproduces the stored coefficients
    H = heisenberg_algebroid()
    ch = graded_chart_of(H)
    Q = homological_field_on(H, ch)
    V = vertical_endomorphism(ch)
    S = graded_fn_11(graded_lie_derivative(Q, V), V)
    assert not S.is_zero_vv2()
    zero = GradedFunction(ch, {})
    one = GradedFunction.scalar(ch, sp.Integer(1))

    def even_frame(i):
        xc = [one if j == i else zero for j in range(ch.n)]
        return GradedVectorField(ch, 0, xc, [zero] * ch.r)

    vals = S.evaluate_components(even_frame(0), even_frame(1))
    direct = []
    for c, beta in enumerate(S.components):
        direct.append(beta.table.get(((), (0, 1), (0, 0)), sp.Integer(0)))
    for got, want in zip(vals, direct):
        got_scalar = got.table.get((), sp.Integer(0))
        assert canonical(got_scalar - want) == 0


def test_theorem1_with_nontrivial_bundle_map():
    # transport (TM)_N along an x-dependent invertible frame change W:
    # anchor rho_A = N W, bracket transported mechanically through
    # bracket_sections; then U = W^{-1} identifies A with (TM)_N and both
    # theorem forms must pass through the nontrivial identification
    from njk import linalg
    from njk.algebroids import Section, bracket_sections

    N = diag_operator()
    A0 = deformed_structure(N)
    W = [[sp.Integer(1), x1], [ZERO, sp.Integer(1)]]
    Winv = linalg.invert(W)
    n = 2
    Nm = N.matrix()
    rho = [
        [sp.Add(*[Nm[i][k] * W[k][al] for k in range(n)]) for al in range(n)]
        for i in range(n)
    ]
    c = {}
    for al in range(n):
        for be in range(al + 1, n):
            br = bracket_sections(
                A0,
                Section.make([W[k][al] for k in range(n)]),
                Section.make([W[k][be] for k in range(n)]),
            )
            comps = [
                sp.Add(*[Winv[g][k] * br.components[k] for k in range(n)])
                for g in range(n)
            ]
            c[(al, be)] = tuple(comps)
    A = AlgebroidData("transported", M2, n, rho, c)
    assert check_lie_algebroid(A).passed
    U = BundleMapU.make(Winv)
    report = theorem1_check(A, U)
    assert report.passed, "\n".join(report.lines())
    for key in ("theorem1_form1", "theorem1_form2", "lift_identity"):
        assert report.get(key).verdict == "ProvedZero"

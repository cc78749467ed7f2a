import random

import sympy as sp

from njk.algebroids import (
    AlgebroidData,
    BundleMapU,
    IMTriple,
    Section,
    a_torsion,
    algebroid_lie_derivative,
    bracket_sections,
    check_lie_algebroid,
    deformed_structure,
    im_check,
    lemma_triple,
    section_is_zero,
    tangent_lift_triple,
)
from njk.scalars import ZERO, canonical, is_zero, var
from njk.tensors import Chart, VVForm, coordinate_field, lie_derivative, nijenhuis_torsion, vvform_is_zero

M2 = Chart.make("M2", "x1 x2")
x1, x2 = M2.coords


def tangent_algebroid(chart):
    n = chart.dim
    rho = [[sp.Integer(1) if i == j else ZERO for j in range(n)] for i in range(n)]
    return AlgebroidData(f"T{chart.name}", chart, n, rho)


def diag_operator():
    return VVForm.tensor11(M2, [[1 + x1**2, ZERO], [ZERO, x2**3]])


def broken_operator():
    # x2 dx1 (x) d/dx1 has torsion x2 d/dx1 on the (1,2) pair
    return VVForm.tensor11(M2, [[x2, ZERO], [ZERO, ZERO]])


def prelie_action_algebroid():
    """dim-2 pre-Lie algebra e1|>e2 = e2 (others zero): anchor X_L(a) = -L(a)x,
    structure constants of the commutator Lie bracket."""
    rho = [[ZERO, ZERO], [-x2, ZERO]]  # rho(c_{e1}) = -e1|>x = -x2 d/dx2
    c = {(0, 1): (ZERO, sp.Integer(1))}  # [e1,e2] = e1|>e2 - e2|>e1 = e2
    return AlgebroidData("prelie2", M2, 2, rho, c)


def random_section(rng):
    def poly():
        return sp.Rational(rng.randint(-3, 3), rng.randint(1, 2)) + rng.randint(-2, 2) * x1 + rng.randint(-2, 2) * x2**2

    return Section.make([poly(), poly()])


# -- bracket -----------------------------------------------------------------


def test_constant_sections_bracket_to_structure_constants():
    A = prelie_action_algebroid()
    b = bracket_sections(A, A.frame_section(0), A.frame_section(1))
    assert [canonical(c) for c in b.components] == [ZERO, sp.Integer(1)]


def test_bracket_alternating():
    A = prelie_action_algebroid()
    rng = random.Random(1)
    a = random_section(rng)
    assert section_is_zero(bracket_sections(A, a, a)).holds


def test_bracket_leibniz():
    A = prelie_action_algebroid()
    rng = random.Random(2)
    for _ in range(5):
        a, b = random_section(rng), random_section(rng)
        f = 1 + x1 * x2 + rng.randint(-2, 2) * x1**2
        lhs = bracket_sections(A, a, b * f)
        rho_a = A.anchor_of(a).as_vector()
        rhs = bracket_sections(A, a, b) * f + b * sp.Add(
            *[rho_a[i] * sp.diff(f, M2.coords[i]) for i in range(2)]
        )
        assert section_is_zero(lhs - rhs).holds


# -- axiom checking ----------------------------------------------------------


def test_tangent_algebroid_passes():
    report = check_lie_algebroid(tangent_algebroid(M2))
    assert report.passed
    assert all(item.result.verdict == "ProvedZero" for item in report.items)


def test_deformed_diag_passes():
    N = diag_operator()
    assert nijenhuis_torsion(N).is_zero_form()
    assert check_lie_algebroid(deformed_structure(N)).passed


def test_deformed_broken_fails():
    N = broken_operator()
    assert not nijenhuis_torsion(N).is_zero_form()
    report = check_lie_algebroid(deformed_structure(N))
    assert not report.passed
    assert any(item.result.verdict == "ProvedNonzero" for item in report.items)


def test_prelie_algebroid_passes():
    assert check_lie_algebroid(prelie_action_algebroid()).passed


# -- deformed structure ------------------------------------------------------


def test_deformed_zero_is_abelian():
    A = deformed_structure(VVForm.zero(M2, 1) + VVForm.tensor11(M2, [[ZERO, ZERO], [ZERO, ZERO]]))
    assert all(canonical(e) == 0 for row in A.rho for e in row)
    assert not A.c


def test_deformed_structure_functions_are_curl():
    N = VVForm.tensor11(M2, [[x1 * x2, x2**2], [x1, ZERO]])
    A = deformed_structure(N)
    m = N.matrix()
    expect = tuple(
        canonical(sp.diff(m[k][1], x1) - sp.diff(m[k][0], x2)) for k in range(2)
    )
    assert tuple(canonical(e) for e in A.structure(0, 1)) == expect


def test_rank1_deformed_matches_vector_field_bracket():
    M1 = Chart.make("M1", "theta")
    theta = M1.coords[0]
    F = theta**2 + 1
    N = VVForm.tensor11(M1, [[F]])
    A = deformed_structure(N)
    f = theta + 2
    g = theta**3
    got = bracket_sections(A, Section.make([f]), Section.make([g]))
    expect = F * (f * sp.diff(g, theta) - g * sp.diff(f, theta))
    assert canonical(got.components[0] - expect) == 0


# -- algebroid Lie derivative -------------------------------------------------


def test_lie_derivative_of_identity_on_tangent_algebroid():
    A = tangent_algebroid(M2)
    U = BundleMapU.identity(2)
    for al in range(2):
        out = algebroid_lie_derivative(A, A.frame_section(al), U)
        assert all(canonical(c) == 0 for c in out.entries())


def test_deformed_lie_derivative_recovers_classical():
    # L^{(TM)_N}_Y I = L_Y N for arbitrary polynomial sections Y
    N = VVForm.tensor11(M2, [[x1 * x2, ZERO], [x2, x1**2]])
    A = deformed_structure(N)
    U = BundleMapU.identity(2)
    rng = random.Random(3)
    for _ in range(3):
        Y = random_section(rng)
        got = algebroid_lie_derivative(A, Y, U)
        Yf = VVForm.vector_field(M2, list(Y.components))
        LN = lie_derivative(Yf, N).matrix()
        for i in range(2):
            for k in range(2):
                assert is_zero(got.values[i].components[k] - LN[k][i]).holds


def test_action_algebroid_constant_derivative():
    A = prelie_action_algebroid()
    U = BundleMapU.identity(2)
    a = A.frame_section(0)
    got = algebroid_lie_derivative(A, a, U)
    # expand by hand: [c_a, U d_i]_A - U [rho(a), d_i]
    for i in range(2):
        expect = bracket_sections(A, a, U.column(i))
        w = [
            -sp.diff(A.anchor_of(a).as_vector()[j], M2.coords[i]) for j in range(2)
        ]
        expect = expect - Section.make(
            [sp.Add(*[U.matrix[al][j] * w[j] for j in range(2)]) for al in range(2)]
        )
        assert section_is_zero(got.values[i] - expect).holds


# -- A-torsion ----------------------------------------------------------------


def test_a_torsion_of_tensor_on_tangent_algebroid_is_nijenhuis_torsion():
    # definitions coincide: T^{TM}_N = T_N
    rng = random.Random(4)
    for N in (diag_operator(), broken_operator()):
        A = tangent_algebroid(M2)
        U = BundleMapU.make(N.matrix())
        T = a_torsion(A, U)
        TN = nijenhuis_torsion(N)
        for k in range(2):
            assert is_zero(T.value(0, 1).components[k] - TN.coeff((0, 1), k)).holds


def test_a_torsion_of_identity_on_deformed_vanishes():
    # the identity is an isomorphism (TM)_N -> (TM)_N whatever the torsion
    for N in (diag_operator(), broken_operator()):
        A = deformed_structure(N)
        T = a_torsion(A, BundleMapU.identity(2))
        assert all(canonical(c) == 0 for c in T.entries())


def test_prelie_a_torsion_vanishes_on_basis_pairs():
    A = prelie_action_algebroid()
    T = a_torsion(A, BundleMapU.identity(2))
    assert all(canonical(c) == 0 for c in T.entries())


def test_random_bundle_map_torsion_matches_term_expansion():
    A = tangent_algebroid(M2)
    U = BundleMapU.make([[x1, x2], [ZERO, x1 * x2]])
    T = a_torsion(A, U)
    # term-by-term oracle with the full four-term formula
    for i, j in [(0, 1)]:
        X = coordinate_field(M2, i)
        Y = coordinate_field(M2, j)
        t = bracket_sections(A, U.column(i), U.column(j))
        from njk.tensors import lie_bracket

        t = t + U.apply_to_field(A.anchor_of(U.apply_to_field(lie_bracket(X, Y))))
        t = t - U.apply_to_field(lie_bracket(A.anchor_of(U.column(i)), Y))
        t = t - U.apply_to_field(lie_bracket(X, A.anchor_of(U.column(j))))
        assert section_is_zero(T.value(i, j) - t).holds


# -- IM triples ---------------------------------------------------------------


def test_zero_triple_is_im():
    for A in (tangent_algebroid(M2), prelie_action_algebroid(), deformed_structure(diag_operator())):
        assert im_check(A, IMTriple.zero(A)).passed


def test_tangent_lift_of_nijenhuis_is_im_on_deformed():
    N = diag_operator()
    A = deformed_structure(N)
    triple = tangent_lift_triple(N)
    assert im_check(A, triple).passed


def test_tangent_lift_on_broken_deformed_fails():
    N = broken_operator()
    A = deformed_structure(N)
    report = im_check(A, tangent_lift_triple(N))
    assert not report.passed


def test_tangent_lift_d_matches_fn_bracket():
    N = diag_operator()
    triple = tangent_lift_triple(N)
    for g in range(2):
        LT = lie_derivative(coordinate_field(M2, g), N).matrix()
        for i in range(2):
            for k in range(2):
                assert canonical(triple.frame_action[g].values[i].components[k] - LT[k][i]) == 0


def test_tangent_lift_diag_hand_expansion():
    f = 1 + x1**2
    g = x2**3
    N = VVForm.tensor11(M2, [[f, ZERO], [ZERO, g]])
    triple = tangent_lift_triple(N)
    # D(d_1) = L_{d_1} N = f' dx1 (x) d_1; single nonzero entry
    d0 = triple.frame_action[0].matrix()
    assert canonical(d0[0][0] - sp.diff(f, x1)) == 0
    assert all(
        canonical(d0[i][k]) == 0 for i in range(2) for k in range(2) if (i, k) != (0, 0)
    )


def test_lemma_triple_on_deformed_equals_tangent_lift():
    N = diag_operator()
    A = deformed_structure(N)
    lt = lemma_triple(A, BundleMapU.identity(2))
    tl = tangent_lift_triple(N)
    assert vvform_is_zero(lt.tm - tl.tm).holds
    for a in range(2):
        for b in range(2):
            assert is_zero(lt.ell[a][b] - tl.ell[a][b]).holds
    for g in range(2):
        diff = lt.frame_action[g] - tl.frame_action[g]
        assert all(canonical(c) == 0 for c in diff.entries())


def test_lemma_triple_zero_map():
    A = prelie_action_algebroid()
    U = BundleMapU.make([[ZERO, ZERO], [ZERO, ZERO]])
    t = lemma_triple(A, U)
    assert all(canonical(e) == 0 for row in t.ell for e in row)
    assert t.tm.is_zero_form()
    assert all(canonical(c) == 0 for g in range(2) for c in t.frame_action[g].entries())


def test_lemma_triple_prelie_blocks():
    # ell = U o rho and T^M = rho o U recover the -a|>x structure
    A = prelie_action_algebroid()
    t = lemma_triple(A, BundleMapU.identity(2))
    assert canonical(t.ell[1][0] - (-x2)) == 0
    assert canonical(t.tm.matrix()[1][0] - (-x2)) == 0


def test_lemma_triple_fourth_identity_by_construction():
    A = prelie_action_algebroid()
    t = lemma_triple(A, BundleMapU.make([[x1, x2], [1, x1]]))
    report = im_check(A, t)
    assert report.get("TM_anchor_ell").verdict == "ProvedZero"

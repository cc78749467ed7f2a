import random

import pytest
import sympy as sp

from njk.scalars import ZERO, canonical, is_zero, var
from njk.tensors import (
    Chart,
    InverseCheckError,
    ScalarForm,
    SmoothMap,
    VVForm,
    contract_form,
    coordinate_field,
    exterior_derivative,
    fn_bracket,
    lie_bracket,
    lie_derivative,
    lie_derivative_form,
    nijenhuis_torsion,
    pushforward,
    related_check,
    scalarform_is_zero,
    vvform_is_zero,
)

M2 = Chart.make("M2", "x y")
M3 = Chart.make("M3", "x y z")
x, y, z = var("x"), var("y"), var("z")


def random_poly(rng, coords, deg=2):
    e = sp.Integer(rng.randint(-3, 3))
    for _ in range(deg):
        e = e + sp.Rational(rng.randint(-4, 4), rng.randint(1, 3)) * rng.choice(coords) ** rng.randint(1, 2)
    return e


def random_vector_field(rng, chart):
    return VVForm.vector_field(chart, [random_poly(rng, chart.coords) for _ in range(chart.dim)])


def random_tensor11(rng, chart):
    return VVForm.tensor11(
        chart,
        [[random_poly(rng, chart.coords) for _ in range(chart.dim)] for _ in range(chart.dim)],
    )


# -- Lie bracket -------------------------------------------------------------


def test_coordinate_fields_commute():
    X = coordinate_field(M2, 0)
    Y = coordinate_field(M2, 1)
    assert lie_bracket(X, Y).is_zero_form()


def test_sl2_relation():
    X = VVForm.vector_field(M2, [ZERO, x])  # x d/dy
    Y = VVForm.vector_field(M2, [y, ZERO])  # y d/dx
    b = lie_bracket(X, Y)
    assert b.as_vector() == [x, -y]


def test_bracket_antisymmetry_and_jacobi():
    rng = random.Random(2)
    for _ in range(20):
        chart = rng.choice([M2, M3])
        X, Y, Z = (random_vector_field(rng, chart) for _ in range(3))
        assert vvform_is_zero(lie_bracket(X, Y) + lie_bracket(Y, X)).holds
        jac = (
            lie_bracket(X, lie_bracket(Y, Z))
            + lie_bracket(Y, lie_bracket(Z, X))
            + lie_bracket(Z, lie_bracket(X, Y))
        )
        assert vvform_is_zero(jac).holds


# -- torsion -----------------------------------------------------------------


def test_identity_tensor_is_nijenhuis():
    assert nijenhuis_torsion(VVForm.identity(M2)).is_zero_form()


def test_vertical_endomorphism_is_nijenhuis():
    TB = Chart.make("TB", "z zdot")
    V = VVForm.tensor11(TB, [[ZERO, ZERO], [sp.Integer(1), ZERO]])  # dz (x) d/dzdot
    assert nijenhuis_torsion(V).is_zero_form()


def brute_force_torsion(N):
    """Defining formula evaluated on all coordinate-field pairs, with the
    N^2[X,Y] term retained."""
    chart = N.chart
    table = {}
    N2 = N.compose11(N)
    for i in range(chart.dim):
        for j in range(i + 1, chart.dim):
            X, Y = coordinate_field(chart, i), coordinate_field(chart, j)
            t = lie_bracket(N.apply_to_vector(X), N.apply_to_vector(Y))
            t = t + N2.apply_to_vector(lie_bracket(X, Y))
            t = t - N.apply_to_vector(lie_bracket(N.apply_to_vector(X), Y))
            t = t - N.apply_to_vector(lie_bracket(X, N.apply_to_vector(Y)))
            for o, c in enumerate(t.as_vector()):
                if c != 0:
                    table[((i, j), o)] = c
    return VVForm(chart, 2, table)


def test_torsion_against_brute_force():
    N = VVForm.tensor11(M2, [[y, ZERO], [ZERO, ZERO]])  # y dx (x) d/dx
    T = nijenhuis_torsion(N)
    B = brute_force_torsion(N)
    assert vvform_is_zero(T - B).holds
    rng = random.Random(3)
    for _ in range(5):
        N = random_tensor11(rng, M3)
        assert vvform_is_zero(nijenhuis_torsion(N) - brute_force_torsion(N)).holds


# -- FN bracket --------------------------------------------------------------


def test_fn_degree0_reduces_to_lie_bracket():
    rng = random.Random(4)
    for _ in range(10):
        chart = rng.choice([M2, M3])
        X = random_vector_field(rng, chart)
        Y = random_vector_field(rng, chart)
        assert vvform_is_zero(fn_bracket(X, Y) - lie_bracket(X, Y)).holds


def test_torsion_is_half_fn_self_bracket():
    rng = random.Random(5)
    for _ in range(20):
        chart = rng.choice([M2, M3])
        N = random_tensor11(rng, chart)
        lhs = nijenhuis_torsion(N)
        rhs = fn_bracket(N, N) * sp.Rational(1, 2)
        diff = lhs - rhs
        assert vvform_is_zero(diff).holds
        r = vvform_is_zero(diff)
        assert r.verdict == "ProvedZero"


def test_fn_symmetric_for_two_one_one_tensors():
    rng = random.Random(6)
    for _ in range(5):
        K = random_tensor11(rng, M2)
        L = random_tensor11(rng, M2)
        assert vvform_is_zero(fn_bracket(K, L) - fn_bracket(L, K)).holds


def test_fn_vertical_endomorphism_integrable():
    TB = Chart.make("TB", "z zdot")
    V = VVForm.tensor11(TB, [[ZERO, ZERO], [sp.Integer(1), ZERO]])
    assert fn_bracket(V, V).is_zero_form()


# -- Lie derivative ----------------------------------------------------------


def test_lie_derivative_of_identity_vanishes():
    rng = random.Random(7)
    X = random_vector_field(rng, M2)
    assert vvform_is_zero(lie_derivative(X, VVForm.identity(M2))).holds


def test_lie_derivative_evaluation_identity():
    # (L_Y N)(X) = [Y, NX] - N[Y, X]
    rng = random.Random(8)
    for _ in range(5):
        N = random_tensor11(rng, M2)
        Y = random_vector_field(rng, M2)
        X = random_vector_field(rng, M2)
        LN = lie_derivative(Y, N)
        lhs = LN.apply_to_vector(X)
        rhs = lie_bracket(Y, N.apply_to_vector(X)) - N.apply_to_vector(lie_bracket(Y, X))
        assert vvform_is_zero(lhs - rhs).holds


def test_lie_derivative_scaling_example():
    X = VVForm.vector_field(M2, [x, ZERO])
    T = VVForm.tensor11(M2, [[sp.Integer(1), ZERO], [ZERO, ZERO]])  # dx (x) d/dx
    assert lie_derivative(X, T).is_zero_form()


def test_lie_derivative_derivation_over_contraction():
    # L_X(T(Y)) = (L_X T)(Y) + T([X, Y])
    rng = random.Random(9)
    for _ in range(5):
        T = random_tensor11(rng, M2)
        X = random_vector_field(rng, M2)
        Y = random_vector_field(rng, M2)
        lhs = lie_bracket(X, T.apply_to_vector(Y))
        rhs = lie_derivative(X, T).apply_to_vector(Y) + T.apply_to_vector(lie_bracket(X, Y))
        assert vvform_is_zero(lhs - rhs).holds


# -- scalar forms ------------------------------------------------------------


def test_exterior_derivative_basics():
    alpha = ScalarForm(M2, 1, {(1,): x})  # x dy
    d = exterior_derivative(alpha)
    assert d.coeff((0, 1)) == 1
    assert exterior_derivative(ScalarForm.dx(M2, 0)).is_zero_form()


def test_d_squared_zero():
    rng = random.Random(10)
    for _ in range(5):
        alpha = ScalarForm(M3, 1, {(i,): random_poly(rng, M3.coords) for i in range(3)})
        assert scalarform_is_zero(exterior_derivative(exterior_derivative(alpha))).holds
    f = ScalarForm.function(M3, random_poly(rng, M3.coords))
    assert scalarform_is_zero(exterior_derivative(exterior_derivative(f))).holds


def test_contraction_example():
    dxdy = ScalarForm(M2, 2, {(0, 1): sp.Integer(1)})
    got = contract_form(coordinate_field(M2, 0), dxdy)
    assert got.coeff((1,)) == 1 and len(got.table) == 1


def test_cartan_formula_consistency():
    # L_X f = X(f) and L_X commutes with d
    rng = random.Random(11)
    X = random_vector_field(rng, M2)
    f = random_poly(rng, M2.coords)
    f0 = ScalarForm.function(M2, f)
    lf = lie_derivative_form(X, f0)
    expect = sp.Add(*[X.as_vector()[j] * sp.diff(f, M2.coords[j]) for j in range(2)])
    assert canonical(lf.coeff(()) - expect) == 0
    alpha = ScalarForm(M2, 1, {(0,): random_poly(rng, M2.coords), (1,): random_poly(rng, M2.coords)})
    lhs = lie_derivative_form(X, exterior_derivative(alpha))
    rhs = exterior_derivative(lie_derivative_form(X, alpha))
    assert scalarform_is_zero(lhs - rhs).holds


# -- pushforward / relatedness ----------------------------------------------


def test_pushforward_identity():
    rng = random.Random(12)
    T = random_tensor11(rng, M2)
    ident = SmoothMap.identity(M2)
    assert vvform_is_zero(pushforward(ident, T, ident) - T).holds


def test_pushforward_roundtrip():
    A = Chart.make("A", "a b")
    B = Chart.make("B", "p q")
    a, b = A.coords
    p, q = B.coords
    phi = SmoothMap("phi", A, B, [a + b, b])
    phi_inv = SmoothMap("phi_inv", B, A, [p - q, q])
    rng = random.Random(13)
    T = random_tensor11(rng, A)
    back = pushforward(phi_inv, pushforward(phi, T, phi_inv), phi)
    assert vvform_is_zero(back - T).holds


def test_pushforward_swap_of_vertical_endomorphism():
    # kappa swaps the two middle coordinates of (z, u, p, q);
    # V = dz (x) d/dp + du (x) d/dq maps to dz (x) d/du + dp (x) d/dq
    G = Chart.make("TTB", "z u p q")
    V = VVForm(G, 1, {((0,), 2): sp.Integer(1), ((1,), 3): sp.Integer(1)})
    zc, uc, pc, qc = G.coords
    kappa = SmoothMap("kappa", G, G, [zc, pc, uc, qc])
    got = pushforward(kappa, V, kappa)
    expect = VVForm(G, 1, {((0,), 1): sp.Integer(1), ((2,), 3): sp.Integer(1)})
    assert vvform_is_zero(got - expect).holds


def test_pushforward_rejects_wrong_inverse():
    A = Chart.make("A2", "a b")
    a, b = A.coords
    phi = SmoothMap("phi", A, A, [a + b, b])
    bad = SmoothMap("bad", A, A, [a, b])
    with pytest.raises(InverseCheckError):
        pushforward(phi, VVForm.identity(A), bad)


def test_related_check_identity():
    rng = random.Random(14)
    T = random_tensor11(rng, M2)
    r = related_check(SmoothMap.identity(M2), T, T)
    assert r.verdict == "ProvedZero"


def test_related_check_projection():
    # projection (x,y) -> x relates diag(f(x), anything) to f(x) d/dx
    M1 = Chart.make("M1", "x")
    pr = SmoothMap("pr", M2, M1, [x])
    f = 1 + x**2
    T = VVForm.tensor11(M2, [[f, ZERO], [ZERO, y]])
    Tm = VVForm.tensor11(M1, [[f]])
    assert related_check(pr, T, Tm).holds
    bad = VVForm.tensor11(M1, [[f + 1]])
    assert not related_check(pr, T, bad).holds


def test_swap_pushforward_is_t_related_to_base_vertical():
    # the swapped vertical endomorphism of the double tangent chart is
    # t-related (t = u + p slot sum) to the base vertical endomorphism
    G = Chart.make("TTB1", "z u p q")
    TB = Chart.make("TB1", "bz bu")
    zc, uc, pc, qc = G.coords
    V = VVForm(G, 1, {((0,), 2): sp.Integer(1), ((1,), 3): sp.Integer(1)})
    kappa = SmoothMap("kappa", G, G, [zc, pc, uc, qc])
    swapped = pushforward(kappa, V, kappa)
    t = SmoothMap("t", G, TB, [zc, uc + pc])
    V_TB = VVForm(TB, 1, {((0,), 1): sp.Integer(1)})
    assert related_check(t, swapped, V_TB).verdict == "ProvedZero"
    s = SmoothMap("s", G, TB, [zc, uc - pc])
    assert related_check(s, swapped, V_TB).verdict == "ProvedZero"


def test_fn_graded_antisymmetry_mixed_degrees():
    # [X, K] = -[K, X] for a vector field against a (1,1) tensor, while two
    # (1,1) tensors bracket symmetrically
    rng = random.Random(21)
    for _ in range(5):
        X = random_vector_field(rng, M2)
        K = random_tensor11(rng, M2)
        assert vvform_is_zero(fn_bracket(X, K) + fn_bracket(K, X)).holds

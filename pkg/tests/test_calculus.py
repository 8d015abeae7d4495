import math
import warnings

import numpy as np
import pytest

from tropicalis import calculus as calc
from tropicalis.calculus import (
    HJState, SampledFunction, cole_hopf_evolve, deformed_min_sum, hj_gap_table, hopf_lax,
    hopf_lax_step, idem_integral, idem_integral_wrt, idem_measure, inf_convolution, legendre,
    legendre_inverse, make_grid, shift, sup_convolution,
)
from tropicalis.duality import scalar_product
from tropicalis.errors import DomainError, ParseError, ShapeError
from tropicalis.semiring import NEG_INF, POS_INF


def sf(values, origin=0.0, step=1.0, orientation="max_plus"):
    return SampledFunction(origin, step, values, orientation)


# -- integrals and measures -------------------------------------------------------------

def test_integral_examples():
    assert idem_integral(sf([1, 4, -2])) == 4
    assert idem_integral(sf([NEG_INF, NEG_INF])) == NEG_INF
    assert idem_integral(sf([1, 4, -2], orientation="min_plus")) == -2


def test_measure_examples_and_union_law():
    psi = sf(np.zeros(6))
    assert idem_measure(psi, [1, 4]) == 0
    assert idem_measure(psi, []) == NEG_INF
    assert idem_measure(sf([0, 0], orientation="min_plus"), []) == POS_INF
    rng = np.random.default_rng(0)
    psi = sf(rng.integers(-9, 10, 20).astype(float))
    for _ in range(200):
        Y1 = list(rng.choice(20, int(rng.integers(0, 6))))
        Y2 = list(rng.choice(20, int(rng.integers(0, 6))))
        assert idem_measure(psi, Y1 + Y2) == max(idem_measure(psi, Y1), idem_measure(psi, Y2))
        assert idem_measure(psi, Y1) <= idem_measure(psi, Y1 + Y2)
    assert idem_measure(psi, [7]) == psi.values[7]
    with pytest.raises(DomainError):
        idem_measure(psi, [20])


def test_integral_with_density():
    phi = sf([3, -1, 2])
    assert idem_integral_wrt(phi, sf([0, 0, 0])) == idem_integral(phi)
    assert idem_integral_wrt(phi, sf([-3, 1, -2])) == 0
    assert idem_integral_wrt(phi, sf([NEG_INF, 5, NEG_INF])) == 4
    rng = np.random.default_rng(1)
    for _ in range(100):
        a = rng.integers(-9, 10, 7).astype(float)
        b = rng.integers(-9, 10, 7).astype(float)
        a[rng.random(7) < 0.2] = NEG_INF
        assert idem_integral_wrt(sf(a), sf(b)) == scalar_product(a, b)
        k = float(rng.integers(-5, 6))
        assert idem_integral_wrt(shift(sf(a), k), sf(b)) == k + idem_integral_wrt(sf(a), sf(b))
    with pytest.raises(ShapeError):
        idem_integral_wrt(phi, sf([0, 0]))
    with pytest.raises(ShapeError):
        idem_integral_wrt(phi, sf([0, 0, 0], orientation="min_plus"))


# -- Legendre ---------------------------------------------------------------------------

def test_legendre_of_constant_is_absolute_value():
    phi = SampledFunction.from_callable(np.zeros_like, -1, 1, 0.25)
    xi = make_grid(-2, 2, 1)
    for fast in (False, True):
        assert list(legendre(phi, xi, fast=fast).values) == [2, 1, 0, 1, 2]


def test_legendre_of_negative_quadratic():
    phi = SampledFunction.from_callable(lambda x: -x * x / 2, -4, 4, 1e-3)
    xi = make_grid(-2, 2, 0.25)
    for fast in (False, True):
        got = legendre(phi, xi, fast=fast).values
        assert np.abs(got - xi * xi / 2).max() <= 1e-3
    assert abs(legendre(phi, [0.0, 1.0]).values[1] - 0.5) <= 1e-3


def test_legendre_is_convex_and_satisfies_fenchel_young():
    rng = np.random.default_rng(2)
    for _ in range(30):
        phi = sf(rng.normal(size=40), origin=-2, step=0.1)
        xi = make_grid(-3, 3, 0.1)
        res = legendre(phi, xi, full=True)
        t = res.transform.values
        assert (t[2:] - 2 * t[1:-1] + t[:-2] >= -1e-9).all()
        pairs = xi[:, None] * phi.grid[None, :] + phi.values[None, :]
        assert (pairs <= t[:, None]).all()
        assert np.array_equal(pairs[np.arange(xi.size), res.argmax], t)


def test_fenchel_convention():
    phi = SampledFunction.from_callable(lambda x: x * x / 2, -4, 4, 1e-3)
    xi = make_grid(-2, 2, 0.5)
    for fast in (False, True):
        assert np.abs(legendre(phi, xi, fenchel=True, fast=fast).values - xi * xi / 2).max() <= 1e-3


def test_fast_falls_back_on_nonconcave_input():
    phi = sf([0, 1, 0, 1, 0])
    xi = make_grid(-1, 1, 0.5)
    with pytest.warns(RuntimeWarning, match="not concave"):
        res = legendre(phi, xi, fast=True, full=True)
    assert res.mode == "brute" and "brute" in res.note
    assert np.array_equal(res.transform.values, legendre(phi, xi).values)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert legendre(sf([-4, -1, 0, -1, -4]), xi, fast=True, full=True).mode == "fast"


def test_fast_handles_zero_padding():
    phi = sf([NEG_INF, 0, 1, 1.5, NEG_INF], origin=-2, step=1)
    assert calc.is_concave(phi.values)
    xi = make_grid(-2, 2, 0.25)
    assert np.array_equal(legendre(phi, xi, fast=True).values, legendre(phi, xi).values)
    assert not calc.is_concave(np.array([0.0, NEG_INF, 0.0]))


def test_legendre_errors():
    phi = sf([0, 0, 0])
    with pytest.raises(DomainError):
        legendre(phi, [])
    with pytest.raises(DomainError):
        legendre(phi, [0.0, 1.0, 3.0])
    with pytest.raises(DomainError):
        legendre(phi, [1.0, 0.0])
    with pytest.raises(DomainError):
        legendre(sf([0, POS_INF]), [0.0, 1.0])


def test_double_transform_returns_concave_input():
    phi = SampledFunction.from_callable(lambda x: -np.abs(x) ** 1.5, -2, 2, 0.01)
    xi = make_grid(-4, 4, 0.01)
    back = legendre_inverse(legendre(phi, xi), phi.grid)
    assert np.abs(back.values - phi.values).max() <= 2 * phi.step


# -- convolutions -----------------------------------------------------------------------------

def test_parallel_sum_of_quadratics():
    a, b, step = 2.0, 3.0, 0.01
    f = SampledFunction.from_callable(lambda x: a * x * x / 2, -3, 3, step, "min_plus")
    g = SampledFunction.from_callable(lambda x: b * x * x / 2, -3, 3, step, "min_plus")
    h = inf_convolution(f, g)
    x = h.grid
    sel = h.interior & (np.abs(x) <= 2)
    assert sel.sum() > 300
    want = a * b / (a + b) * x * x / 2
    assert np.abs(h.values - want)[sel].max() <= 1e-3


def test_convolution_unit_and_algebra():
    rng = np.random.default_rng(3)
    phi = sf(rng.integers(-9, 10, 12).astype(float))
    delta = sf([0.0, NEG_INF])
    out = sup_convolution(phi, delta).values
    assert np.array_equal(out[:12], phi.values) and out[12] == NEG_INF
    f, g, k = (sf(rng.integers(-9, 10, n).astype(float)) for n in (5, 7, 4))
    assert np.array_equal(sup_convolution(f, g).values, sup_convolution(g, f).values)
    lhs = sup_convolution(sup_convolution(f, g), k).values
    rhs = sup_convolution(f, sup_convolution(g, k)).values
    assert np.array_equal(lhs, rhs)
    with pytest.raises(ShapeError):
        sup_convolution(f, sf([0, 0], step=0.5))
    with pytest.raises(ShapeError):
        calc.convolve(f, sf([0, 0], orientation="min_plus"))


def test_transform_of_convolution_is_sum_of_transforms():
    rng = np.random.default_rng(4)
    for _ in range(20):
        f = sf(rng.integers(-9, 10, 15).astype(float), origin=-1, step=0.125)
        g = sf(rng.integers(-9, 10, 9).astype(float), origin=0.5, step=0.125)
        xi = make_grid(-3, 3, 0.25)
        lhs = legendre(sup_convolution(f, g), xi).values
        rhs = legendre(f, xi).values + legendre(g, xi).values
        assert np.abs(lhs - rhs).max() <= 1e-9


# -- Hopf-Lax ---------------------------------------------------------------------------------

def _quad(step=0.01, lo=-6, hi=6):
    return SampledFunction.from_callable(lambda y: y * y / 2, lo, hi, step, "min_plus")


def test_hopf_lax_quadratic():
    S = hopf_lax(_quad(), 1.0)
    x = S.grid
    sel = S.interior & (np.abs(x) <= 2)
    assert np.abs(S.values - x * x / 4)[sel].max() <= 1e-3


def test_hopf_lax_affine_data():
    p, dt = 0.5, 1.0
    S0 = SampledFunction.from_callable(lambda y: p * y, -4, 4, 0.01, "min_plus")
    S = hopf_lax(S0, dt)
    x = S.grid
    sel = S.interior
    assert sel.sum() > 500
    assert np.abs(S.values - (p * x - dt * p * p / 2))[sel].max() <= 1e-3


def test_hopf_lax_semigroup_monotone_and_superposition():
    S0 = _quad(0.02)
    full = hopf_lax_step(HJState(S0), 1.0)
    half = hopf_lax_step(hopf_lax_step(HJState(S0), 0.5), 0.5)
    assert half.t == full.t == 1.0
    both = full.S.interior & half.S.interior
    assert np.abs(full.S.values - half.S.values)[both].max() <= 2 * S0.step
    rng = np.random.default_rng(5)
    y = S0.grid
    for _ in range(10):
        A = SampledFunction(S0.origin, S0.step, np.abs(y - rng.uniform(-2, 2)) + rng.uniform(-1, 1), "min_plus")
        B = SampledFunction(S0.origin, S0.step, (y - rng.uniform(-2, 2)) ** 2, "min_plus")
        A, B = shift(A, 0.75), shift(B, -0.5)
        mixed = SampledFunction(S0.origin, S0.step, np.minimum(A.values, B.values), "min_plus")
        lhs = hopf_lax(mixed, 0.7).values
        assert np.array_equal(lhs, np.minimum(hopf_lax(A, 0.7).values, hopf_lax(B, 0.7).values))
        upper = SampledFunction(S0.origin, S0.step, np.maximum(A.values, B.values), "min_plus")
        assert (hopf_lax(A, 0.7).values <= hopf_lax(upper, 0.7).values).all()


def test_hj_errors():
    with pytest.raises(DomainError):
        hopf_lax_step(HJState(_quad(0.5)), 0.0)
    with pytest.raises(DomainError):
        HJState(sf([0, 0]))
    with pytest.raises(DomainError):
        HJState(_quad(0.5), t=-1.0)
    with pytest.raises(DomainError):
        HJState(_quad(0.5), m=0.0)
    with pytest.raises(DomainError):
        cole_hopf_evolve(_quad(0.5), 1.0, 0.0)
    with pytest.raises(DomainError):
        cole_hopf_evolve(_quad(0.5), 0.0, 0.1)
    with pytest.raises(DomainError):
        cole_hopf_evolve(sf([0, NEG_INF], orientation="min_plus"), 1.0, 0.1)
    with pytest.raises(DomainError):
        cole_hopf_evolve(sf([0, 1]), 1.0, 0.1)


# -- Cole-Hopf ----------------------------------------------------------------------------------

def test_cole_hopf_gap_shrinks_with_h():
    for name, fn in calc.CORPUS.items():
        S0 = SampledFunction.from_callable(fn, -6, 6, 0.01, "min_plus")
        gaps = [r.gap for r in hj_gap_table(S0, 1.0, (0.2, 0.1, 0.05, 0.025))]
        assert all(a > b for a, b in zip(gaps, gaps[1:])), (name, gaps)


def test_cole_hopf_is_linear_in_u():
    S1 = _quad(0.02)
    y = S1.grid
    S2 = SampledFunction(S1.origin, S1.step, np.abs(y - 1.0), "min_plus")
    h, t = 0.1, 1.0
    lam1, lam2 = 0.3, 0.7
    mixed = deformed_min_sum(shift(S1, -h * math.log(lam1)), shift(S2, -h * math.log(lam2)), h)
    got = cole_hopf_evolve(mixed, t, h).values
    u1 = np.exp(-cole_hopf_evolve(S1, t, h).values / h)
    u2 = np.exp(-cole_hopf_evolve(S2, t, h).values / h)
    u = np.exp(-got / h)
    assert np.abs(u - (lam1 * u1 + lam2 * u2)).max() <= 1e-12 * np.abs(u).max()
    with pytest.raises(DomainError):
        deformed_min_sum(S1, S2, 0.0)


def test_deformed_min_sum_tends_to_min():
    a = sf([0.0, 1.0, 2.0], orientation="min_plus")
    b = sf([1.0, 1.0, 0.0], orientation="min_plus")
    for h in (1.0, 0.1, 0.01):
        v = deformed_min_sum(a, b, h).values
        m = np.minimum(a.values, b.values)
        assert (v <= m + 1e-15).all() and (v >= m - h * math.log(2) - 1e-15).all()


# -- containers and files ----------------------------------------------------------------------

def test_sampled_function_validation():
    with pytest.raises(DomainError):
        sf([1.0])
    with pytest.raises(DomainError):
        sf([0, 1], step=0)
    with pytest.raises(DomainError):
        sf([0, math.nan])
    with pytest.raises(DomainError):
        sf([0, 1], orientation="plus")
    with pytest.raises(ShapeError):
        SampledFunction(0, 1, [0, 1], interior=[True])
    f = sf(np.arange(10.0), origin=-1, step=0.5)
    g = f.restrict(0.0, 3)
    assert g.origin == 0.0 and list(g.values) == [2, 3, 4]
    with pytest.raises(ShapeError):
        f.restrict(3.0, 5)


def test_make_grid():
    g = make_grid(-2, 2, 0.5)
    assert g.size == 9 and g[0] == -2 and g[-1] == 2
    with pytest.raises(DomainError):
        make_grid(0, 1, 0)
    with pytest.raises(DomainError):
        make_grid(1, 0, 0.5)


def test_sampled_file_round_trip():
    f = SampledFunction(-1.5, 0.25, [0.0, NEG_INF, 1 / 3, -2.5e17], "max_plus")
    g = calc.parse_sampled(calc.format_sampled(f))
    assert g.origin == f.origin and g.step == f.step and g.orientation == f.orientation
    assert np.array_equal(g.values, f.values)
    text = "# comment\n0 1 2 min_plus\n+inf\n0 # trailing\n"
    assert list(calc.parse_sampled(text).values) == [POS_INF, 0]


@pytest.mark.parametrize("text", ["", "0 1 2\n0\n0\n", "0 x 2 max_plus\n0\n0\n",
                                  "0 1 3 max_plus\n0\n0\n", "0 1 2 max_plus\n0\nnan\n"])
def test_sampled_file_errors(text):
    with pytest.raises(ParseError):
        calc.parse_sampled(text)

import itertools

import numpy as np
import pytest

import tropicalis as tp
from tropicalis.duality import (
    TOP, ZERO, FunctionalRep, GeneratorSet, dual_add, dual_scale, double_dual, functional_apply,
    hahn_banach_extend, in_subspace, project_lower, project_upper, random_vector, recover_generator,
    riesz_fischer, run_duality_suite, scalar_product, separate, skew_product, xstar, xstar_eval,
)
from tropicalis.errors import (
    DomainError, InconsistentPrescriptionError, NotInvertibleError, NotSeparableError, ShapeError,
    ZeroFunctionalError,
)
from tropicalis.linalg import TropVector

KGRID = [ZERO] + list(np.arange(-40, 41) / 4) + [TOP]


def _brute_xstar(x, y):
    """inf{k : y <= k*x} over a fine grid that contains every exact answer used here."""
    for k in KGRID:
        kx = np.array([tp.RMAXHAT.mul(k, a) for a in x])
        if np.all(np.asarray(y) <= kx):
            return k
    return TOP


# -- evaluation ---------------------------------------------------------------------

def test_xstar_examples():
    assert xstar_eval([0, 0, 0], [1, -2, 3]) == 3
    assert xstar_eval([1, ZERO], [0, 0]) == TOP
    assert xstar_eval([2.5, -1], [2.5, -1]) == 0
    assert xstar_eval([ZERO, ZERO], [ZERO, ZERO]) == ZERO
    with pytest.raises(ShapeError):
        xstar_eval([0, 0], [0, 0, 0])


def test_xstar_matches_grid_infimum():
    rng = np.random.default_rng(0)
    for _ in range(300):
        x = random_vector(rng, 3, p_top=0.1)
        y = random_vector(rng, 3)
        assert xstar_eval(x, y) == _brute_xstar(x, y)


def test_functional_apply_examples():
    y = [4.0, -1.0, 2.0]
    assert functional_apply(FunctionalRep([0, 0, 0]), y) == 4
    assert functional_apply(FunctionalRep([ZERO, ZERO]), [TOP, 3]) == ZERO
    assert functional_apply(FunctionalRep([-2, 1]), [5, 0]) == 3
    f = FunctionalRep([-2, 1])
    assert f([5, 0]) == max(s + t for s, t in zip([-2, 1], [5, 0]))
    with pytest.raises(ShapeError):
        functional_apply(f, [1, 2, 3])


def test_plain_rmax_vectors_are_promoted():
    x = TropVector(tp.RMAX, [0.0, 1.0])
    assert xstar_eval(x, TropVector(tp.RMAX, [3.0, 0.0])) == 3


# -- recovery and Riesz-Fischer --------------------------------------------------------

def test_recover_generator_examples():
    f = FunctionalRep([-2, 1])
    assert list(recover_generator(f).values) == [2, -1]
    assert list(recover_generator(FunctionalRep([0, 0, 0])).values) == [0, 0, 0]
    assert list(recover_generator(FunctionalRep([3, ZERO])).values) == [-3, TOP]
    with pytest.raises(ZeroFunctionalError):
        recover_generator(FunctionalRep([ZERO, ZERO]))


def test_recovered_generator_is_sup_of_sublevel_set():
    f = FunctionalRep([-2, 1])
    grid = [ZERO] + list(range(-6, 7))
    below = [y for y in itertools.product(grid, repeat=2) if f(y) <= 0]
    assert tuple(np.max(below, axis=0)) == (2, -1)


def test_boolean_recovery_is_sup_of_zero_set():
    for c in itertools.product([0.0, 1.0], repeat=3):
        f = FunctionalRep(c, tp.BOOL)
        if f.is_zero:
            with pytest.raises(ZeroFunctionalError):
                recover_generator(f)
            continue
        x = recover_generator(f).values
        cube = list(itertools.product([0.0, 1.0], repeat=3))
        zeros = [y for y in cube if f(y) == 0]
        assert tuple(np.max(zeros, axis=0)) == tuple(x)
        for y in cube:
            assert (f(y) == 0) == bool(np.all(np.asarray(y) <= x))


def test_riesz_fischer():
    assert list(riesz_fischer(FunctionalRep([0, 0])).values) == [0, 0]
    f = FunctionalRep([5, ZERO])
    psi = riesz_fischer(f)
    assert list(psi.values) == [5, ZERO]
    rng = np.random.default_rng(1)
    for _ in range(200):
        c = random_vector(rng, 4)
        if np.all(c == ZERO):
            continue
        f = FunctionalRep(c)
        y = random_vector(rng, 4, p_top=0.1)
        assert f(y) == scalar_product(riesz_fischer(f), y)
        x, p = recover_generator(f).values, riesz_fischer(f).values
        fin = np.isfinite(p)
        assert np.array_equal(x[fin], -p[fin])
    with pytest.raises(ZeroFunctionalError):
        riesz_fischer(FunctionalRep([ZERO]))
    with pytest.raises(tp.errors.UnsupportedCarrierError):
        riesz_fischer(FunctionalRep([1.0, 0.0], tp.BOOL))


# -- products -------------------------------------------------------------------------

def test_scalar_product():
    assert scalar_product([0, -1], [-3, 1]) == 0
    rng = np.random.default_rng(2)
    for _ in range(200):
        a, b = random_vector(rng, 5), random_vector(rng, 5)
        assert scalar_product(a, np.zeros(5)) == a.max()
        assert scalar_product(a, b) == scalar_product(b, a)
        k = float(rng.integers(-5, 6))
        assert scalar_product(tp.RMAXHAT.mul_array(np.full(5, k), a), b) == tp.RMAXHAT.mul(k, scalar_product(a, b))


def test_skew_product_identities():
    rng = np.random.default_rng(3)
    for _ in range(300):
        x = random_vector(rng, 4, p_zero=0)
        y = random_vector(rng, 4, p_zero=0)
        k = float(rng.integers(-5, 6))
        assert skew_product(x, x) == 0
        assert skew_product(x + k, y) == -k + skew_product(x, y)
        assert skew_product(x, y) == skew_product(-y, -x)
        assert scalar_product(x, y) == skew_product(-y, x)
        x2 = random_vector(rng, 4, p_zero=0)
        assert skew_product(np.minimum(x, x2), y) == max(skew_product(x, y), skew_product(x2, y))
        assert xstar_eval(x, y) == scalar_product(y, -x)


# -- extension and separation -----------------------------------------------------------

def test_hahn_banach_examples():
    f = hahn_banach_extend([0.0], GeneratorSet([[0, 0]]))
    assert list(f.coeffs) == [0, 0]
    for y in ([1, 3], [-2, 0], [4, ZERO]):
        assert f(y) == max(y)
    # x is the sup of the scaled generators; the second coordinate is TOP in c
    f = hahn_banach_extend([0.0], GeneratorSet([[0, ZERO]]))
    assert list(f.coeffs) == [0, TOP]
    for a in range(-5, 6):
        assert f([a, ZERO]) == a


def test_hahn_banach_on_the_whole_space():
    rng = np.random.default_rng(4)
    basis = GeneratorSet(np.where(np.eye(3) == 1, 0.0, ZERO))
    for _ in range(100):
        c = random_vector(rng, 3, p_zero=0)
        g = FunctionalRep(c)
        vals = [g(e) for e in basis.generators]
        ext = hahn_banach_extend(vals, basis, dim=3)
        for _ in range(10):
            y = random_vector(rng, 3)
            assert ext(y) == g(y)


def test_hahn_banach_errors():
    W = GeneratorSet([[0, 0], [1, 1]])
    with pytest.raises(InconsistentPrescriptionError) as info:
        hahn_banach_extend([0.0, 5.0], W)
    w = info.value.witness
    assert w["value_a"] != w["value_b"]
    lhs = W.combine(w["coeffs_a"])
    assert np.array_equal(lhs, W.combine(w["coeffs_b"]))
    assert tuple(lhs) == w["element"]
    with pytest.raises(ZeroFunctionalError):
        hahn_banach_extend([ZERO, ZERO], W)
    with pytest.raises(ShapeError):
        hahn_banach_extend([0.0], W)
    with pytest.raises(ShapeError):
        hahn_banach_extend([0.0, 1.0], W, dim=3)
    with pytest.raises(DomainError):
        hahn_banach_extend([0.0], GeneratorSet([[0, 0]], "inf_closure"))


def test_separate():
    f = separate([1, 0], [0, 0])
    assert list(f.coeffs) == [0, 0]
    assert f([1, 0]) == 1 and f([0, 0]) == 0
    f = separate([1, 0], [0, 1])
    assert f([1, 0]) != f([0, 1])
    with pytest.raises(NotSeparableError):
        separate([2, ZERO], [2, ZERO])
    rng = np.random.default_rng(5)
    for _ in range(300):
        x, y = random_vector(rng, 3, p_top=0.1), random_vector(rng, 3, p_top=0.1)
        if not np.array_equal(x, y):
            f = separate(x, y)
            assert f(x) != f(y)


# -- projections --------------------------------------------------------------------------

def test_project_upper_examples():
    W = GeneratorSet([[0, 0]], "inf_closure")
    assert list(project_upper([1, 3], W).values) == [3, 3]
    assert list(project_upper([2, 2], W).values) == [2, 2]
    assert in_subspace([2, 2], W) and not in_subspace([1, 3], W)
    with pytest.raises(DomainError):
        project_upper([0, 0], GeneratorSet([[0, 0]]))


def test_project_upper_flags_excluded_generators():
    W = GeneratorSet([[0, ZERO]], "inf_closure")
    p, excluded = project_upper([1, 2], W, with_excluded=True)
    assert list(p.values) == [TOP, TOP] and excluded == (0,)
    p, excluded = project_upper([1, ZERO], W, with_excluded=True)
    assert list(p.values) == [1, ZERO] and excluded == ()


def test_project_upper_is_a_homogeneous_closure():
    rng = np.random.default_rng(6)
    for _ in range(100):
        W = GeneratorSet([random_vector(rng, 3, p_zero=0) for _ in range(2)], "inf_closure")
        x1, x2 = random_vector(rng, 3, p_zero=0), random_vector(rng, 3, p_zero=0)
        P = lambda v: project_upper(v, W).values
        p1, p2 = P(x1), P(x2)
        assert np.all(p1 >= x1)
        assert np.array_equal(P(p1), p1)
        k = float(rng.integers(-5, 6))
        assert np.array_equal(P(x1 + k), p1 + k)
        # an inf-closure need not be closed under max, so only the inequality holds
        assert np.all(P(np.maximum(x1, x2)) >= np.maximum(p1, p2))
        if np.all(x1 <= x2):
            assert np.all(p1 <= p2)
        # membership: x in W exactly when [y, x] = [y, P(x)] for the sampled y
        ys = [random_vector(rng, 3) for _ in range(40)] + [np.where(np.arange(3) == i, 0.0, TOP) for i in range(3)]
        same = all(skew_product(y, x1) == skew_product(y, p1) for y in ys)
        assert same == in_subspace(x1, W)


def test_project_upper_is_additive_on_a_subspace():
    # one generator: {k*w} plus the top vector is closed under max as well as inf
    rng = np.random.default_rng(12)
    for _ in range(300):
        W = GeneratorSet([random_vector(rng, 3, p_zero=0)], "inf_closure")
        x1, x2 = random_vector(rng, 3), random_vector(rng, 3)
        P = lambda v: project_upper(v, W).values
        assert np.array_equal(P(np.maximum(x1, x2)), np.maximum(P(x1), P(x2)))


def test_project_lower():
    W = GeneratorSet([[0, 0]])
    assert list(project_lower([1, 3], W).values) == [1, 1]
    assert list(project_lower([4, 4], W).values) == [4, 4]
    Wi = GeneratorSet([[0, 0]], "inf_closure")
    rng = np.random.default_rng(7)
    for _ in range(200):
        x = random_vector(rng, 2, p_zero=0)
        lo, hi = project_lower(x, W).values, project_upper(x, Wi).values
        assert np.all(lo <= x) and np.all(x <= hi)
        assert np.array_equal(project_lower(lo, W).values, lo)
    with pytest.raises(DomainError):
        project_lower([0, 0], Wi)


# -- dual space --------------------------------------------------------------------------

def test_dual_operations():
    rng = np.random.default_rng(8)
    for _ in range(300):
        x1, x2, y = (random_vector(rng, 3, p_top=0.05) for _ in range(3))
        k = float(rng.integers(-5, 6))
        assert xstar_eval(dual_add(x1, x2), y) == max(xstar_eval(x1, y), xstar_eval(x2, y))
        assert xstar_eval(dual_scale(k, x1), y) == tp.RMAXHAT.mul(k, xstar_eval(x1, y))
    y = np.array([1.0, ZERO])
    assert xstar_eval([ZERO, ZERO], y) == TOP
    assert xstar_eval([TOP, TOP], y) == ZERO
    assert list(double_dual([2, -1, 0]).values) == [2, -1, 0]
    assert list(double_dual([ZERO, 3]).values) == [ZERO, 3]
    with pytest.raises(NotInvertibleError):
        dual_scale(ZERO, [0, 0])
    with pytest.raises(NotInvertibleError):
        dual_scale(TOP, [0, 0])


def test_xstar_round_trip():
    rng = np.random.default_rng(9)
    for _ in range(100):
        x = random_vector(rng, 4, p_zero=0.2, p_top=0.2)
        if np.all(x == TOP):
            continue
        assert np.array_equal(recover_generator(xstar(x)).values, x)


# -- containers and suite -------------------------------------------------------------------

def test_generator_set_validation():
    with pytest.raises(DomainError):
        GeneratorSet([])
    with pytest.raises(DomainError):
        GeneratorSet([[ZERO, ZERO]])
    assert GeneratorSet([[ZERO, ZERO]], allow_zero=True).dim == 2
    with pytest.raises(ShapeError):
        GeneratorSet([[0, 0], [0, 0, 0]])
    with pytest.raises(ValueError):
        GeneratorSet([[0]], "span")


def test_duality_suite_passes():
    results = run_duality_suite(3, 300, seed=11)
    assert [r.name for r in results] == ["thm5.1", "thm5.2", "thm5.6", "thm5.7"]
    for r in results:
        assert r.ok, r.line()
        assert r.line().startswith("PASS ")

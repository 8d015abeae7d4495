"""x*-functionals on free finite semimodules over the completed max-plus
semifield, plus the Boolean case.

Vectors live in RMaxHat^n.  Plain RMax input is promoted on entry.  The
functional of a coefficient vector ``c`` is ``y -> max_i (c_i + y_i)``,
computed with the completed product (ZERO absorbs, including against top).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    DomainError,
    InconsistentPrescriptionError,
    NotInvertibleError,
    NotSeparableError,
    ShapeError,
    UnsupportedCarrierError,
    ZeroFunctionalError,
)
from .linalg import TropVector
from .semiring import BOOL, NEG_INF, POS_INF, RMAX, RMAXHAT, SemiringDescriptor

ZERO, TOP = NEG_INF, POS_INF
_mul = RMAXHAT.mul_array


def _res(a, b) -> np.ndarray:
    return RMAXHAT.residual_array(a, b)


def _as_hat(v) -> np.ndarray:
    """Payload array in RMaxHat; TropVectors over RMax are promoted."""
    if isinstance(v, TropVector):
        if v.d not in (RMAX, RMAXHAT):
            raise UnsupportedCarrierError(f"expected an rmax/rmaxhat vector, got {v.d.token}")
        return np.array(v.values, dtype=float)
    return RMAXHAT.check_array(np.asarray(v, dtype=float).reshape(-1))


def _pair(x, y) -> tuple[np.ndarray, np.ndarray]:
    x, y = _as_hat(x), _as_hat(y)
    if x.shape != y.shape:
        raise ShapeError(f"dimension mismatch: {x.shape[0]} vs {y.shape[0]}")
    return x, y


def _vec(a: np.ndarray) -> TropVector:
    return TropVector(RMAXHAT, a + 0.0)


def hat_inv(v):
    """Entrywise order-reversing inverse of RMaxHat: -v, swapping ZERO and top."""
    return -np.asarray(v, dtype=float) + 0.0


@dataclass(frozen=True, eq=False)
class FunctionalRep:
    """f(y) = sup_i c_i * y_i; ``d`` is RMaxHat or Bool."""

    coeffs: np.ndarray
    d: SemiringDescriptor = RMAXHAT

    def __post_init__(self):
        if self.d not in (RMAXHAT, BOOL):
            raise UnsupportedCarrierError("functionals are supported over rmaxhat and bool")
        c = self.d.check_array(np.asarray(self.coeffs, dtype=float).reshape(-1))
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def __len__(self) -> int:
        return self.coeffs.shape[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, FunctionalRep):
            return NotImplemented
        return self.d == other.d and np.array_equal(self.coeffs, other.coeffs)

    __hash__ = None

    def __call__(self, y) -> float:
        return functional_apply(self, y)

    @property
    def is_zero(self) -> bool:
        return bool(np.all(self.coeffs == float(self.d.zero)))


@dataclass(frozen=True)
class GeneratorSet:
    """Finite generators of a subsemimodule.

    ``closure_kind`` is ``"sup_span"`` (all finite sums of scaled
    generators) or ``"inf_closure"`` (all infima of scaled generators).
    """

    generators: tuple[np.ndarray, ...]
    closure_kind: str = "sup_span"
    allow_zero: bool = False

    def __post_init__(self):
        if self.closure_kind not in ("sup_span", "inf_closure"):
            raise ValueError(f"unknown closure kind {self.closure_kind!r}")
        gens = tuple(_as_hat(g) for g in self.generators)
        if not gens:
            raise DomainError("a generator set needs at least one generator")
        if len({g.shape for g in gens}) != 1:
            raise ShapeError("generators have different dimensions")
        if not self.allow_zero and any(np.all(g == ZERO) for g in gens):
            raise DomainError("all-ZERO generator (pass allow_zero=True to keep it)")
        for g in gens:
            g.setflags(write=False)
        object.__setattr__(self, "generators", gens)

    @property
    def dim(self) -> int:
        return self.generators[0].shape[0]

    @property
    def matrix(self) -> np.ndarray:
        return np.stack(self.generators)

    def combine(self, coeffs: Sequence[float]) -> np.ndarray:
        """sup_j k_j * g_j for ``sup_span``, inf_j k_j * g_j for ``inf_closure``."""
        k = np.asarray(coeffs, dtype=float)
        terms = _mul(k[:, None], self.matrix)
        return terms.max(axis=0) if self.closure_kind == "sup_span" else terms.min(axis=0)


# -- evaluation -----------------------------------------------------------------

def xstar_eval(x, y) -> float:
    """x*(y) = inf{k : y <= k*x} = max_i residual(x_i, y_i)."""
    x, y = _pair(x, y)
    return float(_res(x, y).max(initial=ZERO))


def functional_apply(f: FunctionalRep, y) -> float:
    if f.d is BOOL:
        y = BOOL.check_array(np.asarray(y.values if isinstance(y, TropVector) else y, dtype=float))
        if y.shape != f.coeffs.shape:
            raise ShapeError("dimension mismatch")
        return float(np.minimum(f.coeffs, y).max(initial=0.0))
    y = _as_hat(y)
    if y.shape != f.coeffs.shape:
        raise ShapeError(f"dimension mismatch: {f.coeffs.shape[0]} vs {y.shape[0]}")
    return float(_mul(f.coeffs, y).max(initial=ZERO))


def xstar(x) -> FunctionalRep:
    """The functional x* as coefficients: c = inverse of x."""
    return FunctionalRep(hat_inv(_as_hat(x)))


def recover_generator(f: FunctionalRep) -> TropVector:
    """The unique x with f = x*.

    Over RMaxHat x is the entrywise inverse of the coefficients.  Over Bool
    x = sup{y : f(y) = 0}, i.e. the complement of the coefficient support,
    and f(y) = 0 exactly when y <= x.
    """
    if f.is_zero:
        raise ZeroFunctionalError("the zero functional has no generator")
    if f.d is BOOL:
        return TropVector(BOOL, 1.0 - f.coeffs)
    return _vec(hat_inv(f.coeffs))


def riesz_fischer(f: FunctionalRep) -> TropVector:
    """psi with f(y) = <psi, y>; for coefficient functionals psi = c."""
    if f.d is not RMAXHAT:
        raise UnsupportedCarrierError("the scalar product form is defined over rmaxhat")
    if f.is_zero:
        raise ZeroFunctionalError("the zero functional has no representing element")
    return _vec(np.array(f.coeffs))


def scalar_product(p1, p2) -> float:
    """<p1, p2> = sup_i p1_i * p2_i."""
    a, b = _pair(p1, p2)
    return float(_mul(a, b).max(initial=ZERO))


def skew_product(x, y) -> float:
    """[x, y] = x*(y)."""
    return xstar_eval(x, y)


# -- extension and separation ----------------------------------------------------

def hahn_banach_extend(values: Sequence[float], W: GeneratorSet, dim: int | None = None) -> FunctionalRep:
    """Extend the functional prescribed by f(g_j) = v_j on span(W) to the whole space.

    Builds x = sup_j v_j^{-1} * g_j and returns x*.  The prescription is
    consistent exactly when x*(g_j) = v_j for all j; otherwise two
    representations of one span element with different values are reported.
    """
    if W.closure_kind != "sup_span":
        raise DomainError("extension needs a sup_span generator set")
    if dim is not None and dim != W.dim:
        raise ShapeError(f"generators have dimension {W.dim}, expected {dim}")
    v = RMAXHAT.check_array(np.asarray(values, dtype=float).reshape(-1))
    G = W.matrix
    if v.shape[0] != G.shape[0]:
        raise ShapeError(f"{G.shape[0]} generators but {v.shape[0]} values")
    if np.all(v == ZERO):
        raise ZeroFunctionalError("all prescribed values are ZERO")
    x = _mul(hat_inv(v)[:, None], G).max(axis=0)
    got = np.array([xstar_eval(x, g) for g in G])
    bad = np.flatnonzero(got != v)
    if bad.size:
        j = int(bad[0])
        c = got[j]
        k1 = _mul(np.full(v.shape, c), hat_inv(v))
        k2 = k1.copy()
        k2[j] = RMAXHAT.add(k2[j], 0.0)
        witness = {
            "generator": j,
            "element": tuple(W.combine(k1)),
            "coeffs_a": tuple(k1),
            "value_a": float(_mul(k1, v).max()),
            "coeffs_b": tuple(k2),
            "value_b": float(_mul(k2, v).max()),
        }
        raise InconsistentPrescriptionError(
            f"prescribed values are not a-linear on the span: generator {j} "
            f"is forced to {c!r} but prescribed {v[j]!r}",
            witness=witness,
        )
    return xstar(x)


def separate(x, y) -> FunctionalRep:
    """An a-linear functional taking different values at x and y.

    Tries y* first (it separates whenever x is not below y) and then x*.
    """
    x, y = _pair(x, y)
    if np.array_equal(x, y):
        raise NotSeparableError("cannot separate a vector from itself")
    for z in (y, x):
        f = xstar(z)
        if functional_apply(f, x) != functional_apply(f, y):
            return f
    raise NotSeparableError("neither x* nor y* separates the pair")  # unreachable for x != y


# -- projections ---------------------------------------------------------------------

def project_upper(x, W: GeneratorSet, with_excluded: bool = False):
    """Least element of the inf-closure of W that dominates x.

    Closed form inf_j (w_j*(x) * w_j) over generators with w_j*(x) below the
    top; if no generator dominates x after scaling, the result is the top
    vector.  ``with_excluded`` also returns the skipped generator indices.
    """
    if W.closure_kind != "inf_closure":
        raise DomainError("upper projection needs an inf_closure generator set")
    x = _as_hat(x)
    G = W.matrix
    if G.shape[1] != x.shape[0]:
        raise ShapeError("dimension mismatch")
    if np.any(G == TOP):
        raise DomainError("generators with top entries are not supported")
    k = _res(G, x[None, :]).max(axis=1, initial=ZERO)
    keep = k != TOP
    if keep.any():
        out = _mul(k[keep, None], G[keep]).min(axis=0)
    else:
        out = np.full(x.shape, TOP)
    vec = _vec(out)
    if with_excluded:
        return vec, tuple(int(j) for j in np.flatnonzero(~keep))
    return vec


def project_lower(x, W: GeneratorSet) -> TropVector:
    """Greatest element of span(W) below x: sup_j lambda_j * w_j, lambda_j = min_i (x_i - w_ji)."""
    if W.closure_kind != "sup_span":
        raise DomainError("lower projection needs a sup_span generator set")
    x = _as_hat(x)
    G = W.matrix
    if G.shape[1] != x.shape[0]:
        raise ShapeError("dimension mismatch")
    with np.errstate(invalid="ignore"):
        lam = x[None, :] - G
    lam[np.isnan(lam)] = TOP
    lam = lam.min(axis=1)
    return _vec(_mul(lam[:, None], G).max(axis=0, initial=ZERO))


def in_subspace(x, W: GeneratorSet) -> bool:
    """Membership in the inf-closure of W, via P(x) = x."""
    return np.array_equal(project_upper(x, W).values, _as_hat(x))


# -- dual space --------------------------------------------------------------------

def dual_add(x1, x2) -> TropVector:
    """Underlying vector of x1* (+) x2*, i.e. the entrywise min."""
    a, b = _pair(x1, x2)
    return _vec(np.minimum(a, b))


def dual_scale(k: float, x) -> TropVector:
    """Underlying vector of k * x*, i.e. k^{-1} * x."""
    k = RMAXHAT.check(k)
    if k in (ZERO, TOP):
        raise NotInvertibleError("dual scaling needs an invertible scalar")
    return _vec(_mul(np.full(_as_hat(x).shape, -k), _as_hat(x)))


def double_dual(x) -> TropVector:
    """Coordinates of x** read off from the dual basis.

    The i-th coordinate is x**(e_i*) = e_i*(x), where e_i has 0 at i and
    the top elsewhere, so e_i*(x) picks out x_i.
    """
    x = _as_hat(x)
    n = x.shape[0]
    out = np.empty(n)
    for i in range(n):
        e = np.full(n, TOP)
        e[i] = 0.0
        out[i] = xstar_eval(e, x)
    return _vec(out)


# -- randomized suites ---------------------------------------------------------------

def random_vector(rng: np.random.Generator, dim: int, lo: int = -5, hi: int = 5,
                  p_zero: float = 0.1, p_top: float = 0.0) -> np.ndarray:
    v = rng.integers(lo, hi + 1, size=dim).astype(float)
    u = rng.random(dim)
    v[u < p_zero] = ZERO
    v[(u >= p_zero) & (u < p_zero + p_top)] = TOP
    return v


@dataclass(frozen=True)
class SuiteResult:
    name: str
    trials: int
    failures: int
    witness: object = None

    @property
    def ok(self) -> bool:
        return self.failures == 0

    def line(self) -> str:
        return f"{'PASS' if self.ok else 'FAIL'} {self.name} trials={self.trials} failures={self.failures}"


def run_duality_suite(dim: int, trials: int, seed: int = 0) -> list[SuiteResult]:
    """Randomized checks of sup-preservation and homogeneity of x*, generator
    recovery, the dual-space identities and double duality."""
    rng = np.random.default_rng(seed)
    results = []

    fails, wit = 0, None
    for _ in range(trials):
        x = random_vector(rng, dim, p_top=0.05)
        Y = [random_vector(rng, dim) for _ in range(int(rng.integers(0, 5)))]
        k = float(rng.integers(-5, 6)) if rng.random() > 0.1 else ZERO
        y = Y[0] if Y else random_vector(rng, dim)
        sup_y = np.max(Y, axis=0) if Y else np.full(dim, ZERO)
        lhs = xstar_eval(x, sup_y)
        rhs = max([xstar_eval(x, v) for v in Y], default=ZERO)
        hom = xstar_eval(x, _mul(np.full(dim, k), y)) == RMAXHAT.mul(k, xstar_eval(x, y))
        if lhs != rhs or not hom:
            fails += 1
            wit = wit or (tuple(x), [tuple(v) for v in Y], k)
    results.append(SuiteResult("thm5.1", trials, fails, wit))

    fails, wit = 0, None
    for _ in range(trials):
        c = random_vector(rng, dim, p_top=0.05)
        if np.all(c == ZERO):
            c[0] = 0.0
        f = FunctionalRep(c)
        xg = recover_generator(f)
        y = random_vector(rng, dim, p_top=0.05)
        if functional_apply(f, y) != xstar_eval(xg, y):
            fails += 1
            wit = wit or (tuple(c), tuple(y))
    results.append(SuiteResult("thm5.2", trials, fails, wit))

    fails, wit = 0, None
    for _ in range(trials):
        x1, x2, y = (random_vector(rng, dim, p_top=0.05) for _ in range(3))
        k = float(rng.integers(-5, 6))
        ok = xstar_eval(dual_add(x1, x2), y) == max(xstar_eval(x1, y), xstar_eval(x2, y))
        ok &= xstar_eval(dual_scale(k, x1), y) == RMAXHAT.mul(k, xstar_eval(x1, y))
        ok &= xstar_eval(np.full(dim, ZERO), y) == (ZERO if np.all(y == ZERO) else TOP)
        ok &= np.all(y == TOP) or xstar_eval(np.full(dim, TOP), y) == ZERO
        if not ok:
            fails += 1
            wit = wit or (tuple(x1), tuple(x2), tuple(y), k)
    results.append(SuiteResult("thm5.6", trials, fails, wit))

    fails, wit = 0, None
    for _ in range(trials):
        x = random_vector(rng, dim, p_top=0.05)
        if not np.array_equal(double_dual(x).values, x):
            fails += 1
            wit = wit or (tuple(x),)
    results.append(SuiteResult("thm5.7", trials, fails, wit))
    return results

"""Idempotent calculus on uniform one-dimensional grids.

Sup/inf integrals and measures, the max-plus Legendre transform (brute force
and a linear-time hull scan), sup/inf-convolution, Hopf-Lax steps for the
free-particle Hamilton-Jacobi equation and its Cole-Hopf (heat equation)
regularization with parameter h.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Iterable

import numpy as np

from . import kernels
from .errors import DomainError, ParseError, ShapeError
from .semiring import NEG_INF, POS_INF, format_value, parse_value

ORIENTATIONS = ("max_plus", "min_plus")


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """Values on the grid origin + step * k, k = 0..count-1.

    ``interior`` marks samples that are free of grid-truncation effects; it
    is all True for input data and set by the convolution routines.
    """

    origin: float
    step: float
    values: np.ndarray
    orientation: str = "max_plus"
    interior: np.ndarray | None = field(default=None)

    def __post_init__(self):
        if not (self.step > 0 and math.isfinite(self.step)):
            raise DomainError(f"step must be positive and finite, got {self.step!r}")
        if not math.isfinite(self.origin):
            raise DomainError("origin must be finite")
        if self.orientation not in ORIENTATIONS:
            raise DomainError(f"orientation must be one of {ORIENTATIONS}")
        v = np.array(self.values, dtype=float).reshape(-1)
        if v.shape[0] < 2:
            raise DomainError("a sampled function needs at least 2 samples")
        if np.isnan(v).any():
            raise DomainError("NaN sample")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        m = np.ones(v.shape, dtype=bool) if self.interior is None else np.array(self.interior, dtype=bool)
        if m.shape != v.shape:
            raise ShapeError("interior mask must match the values")
        m.setflags(write=False)
        object.__setattr__(self, "interior", m)
        object.__setattr__(self, "origin", float(self.origin))
        object.__setattr__(self, "step", float(self.step))

    @property
    def count(self) -> int:
        return self.values.shape[0]

    @property
    def grid(self) -> np.ndarray:
        return self.origin + self.step * np.arange(self.count)

    @property
    def zero(self) -> float:
        return NEG_INF if self.orientation == "max_plus" else POS_INF

    @classmethod
    def from_callable(cls, fn, lo: float, hi: float, step: float, orientation: str = "max_plus"):
        n = int(round((hi - lo) / step)) + 1
        x = lo + step * np.arange(n)
        return cls(lo, step, np.asarray(fn(x), dtype=float), orientation)

    def restrict(self, origin: float, count: int) -> "SampledFunction":
        """Samples on a sub-grid with the same step (origin snapped to the grid)."""
        k = int(round((origin - self.origin) / self.step))
        if k < 0 or k + count > self.count:
            raise ShapeError("requested window is outside the grid")
        return SampledFunction(self.origin + k * self.step, self.step, self.values[k : k + count],
                               self.orientation, self.interior[k : k + count])


def _same_grid(a: SampledFunction, b: SampledFunction) -> None:
    if a.count != b.count or not math.isclose(a.step, b.step, rel_tol=1e-12) or \
            not math.isclose(a.origin, b.origin, rel_tol=1e-12, abs_tol=1e-12 * a.step):
        raise ShapeError("functions are sampled on different grids")


def _same_step(a: SampledFunction, b: SampledFunction) -> None:
    if not math.isclose(a.step, b.step, rel_tol=1e-12):
        raise ShapeError(f"step mismatch: {a.step!r} vs {b.step!r}")


# -- integrals and measures ------------------------------------------------------

def idem_integral(phi: SampledFunction) -> float:
    """sup of the samples (max-plus) or inf in the usual order (min-plus)."""
    if phi.orientation == "max_plus":
        return float(phi.values.max())
    return float(phi.values.min())


def idem_measure(psi: SampledFunction, Y: Iterable[int]) -> float:
    idx = np.fromiter((int(i) for i in Y), dtype=np.int64)
    if idx.size == 0:
        return psi.zero
    if idx.min() < 0 or idx.max() >= psi.count:
        raise DomainError("index outside the grid")
    vals = psi.values[idx]
    return float(vals.max() if psi.orientation == "max_plus" else vals.min())


def _pointwise_product(a: np.ndarray, b: np.ndarray, orientation: str) -> np.ndarray:
    z = NEG_INF if orientation == "max_plus" else POS_INF
    with np.errstate(invalid="ignore"):
        s = a + b
    s[(a == z) | (b == z)] = z
    return s


def idem_integral_wrt(phi: SampledFunction, psi: SampledFunction) -> float:
    """Integral of phi with density psi: sup (or inf) of phi + psi."""
    _same_grid(phi, psi)
    if phi.orientation != psi.orientation:
        raise ShapeError("orientation mismatch")
    s = _pointwise_product(phi.values, psi.values, phi.orientation)
    return float(s.max() if phi.orientation == "max_plus" else s.min())


# -- Legendre transform --------------------------------------------------------------

def make_grid(lo: float, hi: float, step: float) -> np.ndarray:
    if not step > 0:
        raise DomainError("grid step must be positive")
    n = int(round((hi - lo) / step)) + 1
    if n < 1:
        raise DomainError("empty grid")
    return lo + step * np.arange(n)


def is_concave(values: np.ndarray, tol: float = 1e-12) -> bool:
    """Finite part contiguous with nonpositive second differences (up to tol)."""
    fin = np.flatnonzero(np.isfinite(values))
    if fin.size == 0 or (values[fin] == POS_INF).any():
        return False
    if fin[-1] - fin[0] + 1 != fin.size:
        return False
    if (values[: fin[0]] != NEG_INF).any() or (values[fin[-1] + 1 :] != NEG_INF).any():
        return False
    v = values[fin[0] : fin[-1] + 1]
    if v.size < 3:
        return True
    d2 = v[2:] - 2 * v[1:-1] + v[:-2]
    scale = max(1.0, float(np.abs(v).max()))
    return bool((d2 <= tol * scale * 4).all())


def _upper_hull(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Indices of the upper convex hull of points sorted by x (monotone chain)."""
    hull: list[int] = []
    for i in range(x.shape[0]):
        while len(hull) >= 2:
            a, b = hull[-2], hull[-1]
            # drop b if it lies on or below the segment a -> i
            if (y[b] - y[a]) * (x[i] - x[a]) <= (y[i] - y[a]) * (x[b] - x[a]):
                hull.pop()
            else:
                break
        hull.append(i)
    return np.asarray(hull, dtype=np.int64)


def _legendre_scan(x: np.ndarray, phi: np.ndarray, xi: np.ndarray):
    """sup_i (xi*x_i + phi_i) for ascending xi by walking the upper hull."""
    ok = np.flatnonzero(phi != NEG_INF)
    h = ok[_upper_hull(x[ok], phi[ok])]
    out = np.empty(xi.shape[0])
    arg = np.empty(xi.shape[0], dtype=np.int64)
    k = 0
    for j, s in enumerate(xi):
        best = s * x[h[k]] + phi[h[k]]
        while k + 1 < h.size:
            nxt = s * x[h[k + 1]] + phi[h[k + 1]]
            if nxt < best:
                break
            k += 1
            best = nxt
        out[j], arg[j] = best, h[k]
    return out, arg


@dataclass(frozen=True)
class LegendreResult:
    transform: SampledFunction
    argmax: np.ndarray
    mode: str
    note: str = ""


def legendre(phi: SampledFunction, xi, fenchel: bool = False, fast: bool = False,
             full: bool = False):
    """Max-plus Fourier transform sup_x (xi*x + phi(x)) on a uniform xi grid.

    ``fenchel=True`` computes the classical conjugate sup_x (xi*x - phi(x)).
    ``fast`` uses the hull scan, valid for concave data (convex with
    ``fenchel``); other data falls back to brute force with a warning.
    ``full`` returns a LegendreResult with the maximizing sample indices.
    """
    xi = np.asarray(xi, dtype=float).reshape(-1)
    if xi.size == 0:
        raise DomainError("empty xi grid")
    if xi.size < 2:
        raise DomainError("the xi grid needs at least 2 points")
    dxi = np.diff(xi)
    if not (dxi > 0).all():
        raise DomainError("xi grid must be strictly increasing")
    step = (xi[-1] - xi[0]) / (xi.size - 1)
    if not np.allclose(dxi, step, rtol=1e-9, atol=0):
        raise DomainError("xi grid must be uniform")
    vals = -phi.values if fenchel else phi.values
    if (vals == POS_INF).any():
        raise DomainError("the transformed function takes the value +inf")
    mode, note = "brute", ""
    if fast:
        if is_concave(vals):
            mode = "fast"
        else:
            note = "input is not " + ("convex" if fenchel else "concave") + "; used brute force"
            warnings.warn(note, RuntimeWarning, stacklevel=2)
    x = phi.grid
    if mode == "fast":
        out, arg = _legendre_scan(x, vals, xi)
    else:
        out, arg = kernels.legendre_brute(x, vals, xi)
    res = SampledFunction(float(xi[0]), float(step), out, "max_plus")
    if full:
        return LegendreResult(res, arg, mode, note)
    return res


def legendre_inverse(psi: SampledFunction, x) -> SampledFunction:
    """Recover a concave function from its transform: inf_xi (psi(xi) - xi*x).

    Composed with :func:`legendre` this returns the concave envelope of the
    original samples over the slopes present in the xi grid.
    """
    back = legendre(psi, x, fenchel=True)
    return SampledFunction(back.origin, back.step, -back.values, "max_plus")


# -- convolutions -----------------------------------------------------------------------

def _conv_interior(arg: np.ndarray, n1: int, n2: int) -> np.ndarray:
    xs = np.arange(n1 + n2 - 1)
    y = arg
    return (y > 0) & (y < n1 - 1) & (xs - y > 0) & (xs - y < n2 - 1)


def sup_convolution(f: SampledFunction, g: SampledFunction) -> SampledFunction:
    """(f * g)(x) = sup_y f(y) + g(x - y) on the full grid of length n1 + n2 - 1.

    Samples whose maximizer sits on an edge of either input grid are
    flagged as non-interior.
    """
    _same_step(f, g)
    vals, arg = kernels.sup_convolve(f.values, g.values)
    inner = _conv_interior(arg, f.count, g.count)
    return SampledFunction(f.origin + g.origin, f.step, vals, "max_plus", inner)


def inf_convolution(f: SampledFunction, g: SampledFunction) -> SampledFunction:
    """(f [] g)(x) = inf_y f(y) + g(x - y); +inf acts as the zero."""
    _same_step(f, g)
    vals, arg = kernels.sup_convolve(-f.values, -g.values)
    inner = _conv_interior(arg, f.count, g.count)
    return SampledFunction(f.origin + g.origin, f.step, -vals + 0.0, "min_plus", inner)


def convolve(f: SampledFunction, g: SampledFunction) -> SampledFunction:
    """Semiring convolution in the orientation shared by both inputs."""
    if f.orientation != g.orientation:
        raise ShapeError("orientation mismatch")
    return sup_convolution(f, g) if f.orientation == "max_plus" else inf_convolution(f, g)


# -- Hamilton-Jacobi ------------------------------------------------------------------------

@dataclass(frozen=True)
class HJState:
    S: SampledFunction
    t: float = 0.0
    m: float = 1.0

    def __post_init__(self):
        if self.S.orientation != "min_plus":
            raise DomainError("action functions are min-plus")
        if not self.t >= 0:
            raise DomainError("time must be nonnegative")
        if not self.m > 0:
            raise DomainError("mass must be positive")


def quadratic_kernel(step: float, half_width: int, m: float, dt: float) -> SampledFunction:
    z = step * np.arange(-half_width, half_width + 1)
    return SampledFunction(-half_width * step, step, m * z * z / (2.0 * dt), "min_plus")


def hopf_lax_step(state: HJState, dt: float) -> HJState:
    """S(x, t + dt) = inf_y S(y, t) + m (x - y)^2 / (2 dt) on the same grid.

    The kernel spans the whole grid so every y is a candidate; samples whose
    minimizer is an end point of the grid are flagged as non-interior.
    """
    if not dt > 0:
        raise DomainError("dt must be positive")
    S = state.S
    n = S.count
    K = quadratic_kernel(S.step, n - 1, state.m, dt)
    vals, arg = kernels.sup_convolve(-S.values, -K.values)
    window = slice(n - 1, 2 * n - 1)
    y = arg[window]
    inner = (y > 0) & (y < n - 1) & S.interior[np.clip(y, 0, n - 1)]
    out = SampledFunction(S.origin, S.step, -vals[window] + 0.0, "min_plus", inner)
    return HJState(out, state.t + dt, state.m)


def hopf_lax(S0: SampledFunction, t: float, m: float = 1.0) -> SampledFunction:
    return hopf_lax_step(HJState(S0, 0.0, m), t).S


def _trapezoid_log_weights(n: int, step: float) -> np.ndarray:
    w = np.full(n, step)
    w[0] = w[-1] = step / 2
    return np.log(w)


def cole_hopf_evolve(S0: SampledFunction, t: float, h: float) -> SampledFunction:
    """S_h(x, t) = -h ln u(x, t), u solving the heat equation u_t = (h/2) u_xx
    with u(., 0) = exp(-S0/h).

    The Gaussian convolution is done in the log domain with trapezoid weights
    and a shifted log-sum-exp per output sample.
    """
    if not h > 0:
        raise DomainError("h must be positive")
    if not t > 0:
        raise DomainError("t must be positive")
    if S0.orientation != "min_plus":
        raise DomainError("initial data must be min-plus")
    if (S0.values == NEG_INF).any():
        raise DomainError("initial data must be bounded below")
    y = S0.grid
    with np.errstate(invalid="ignore"):
        a = -S0.values / h + _trapezoid_log_weights(S0.count, S0.step)
    a[S0.values == POS_INF] = NEG_INF
    lse = kernels.lse_quadratic(y, a, y, 1.0 / (2.0 * h * t))
    norm = -0.5 * math.log(2.0 * math.pi * h * t)
    S = -h * (lse + norm)
    return SampledFunction(S0.origin, S0.step, S + 0.0, "min_plus", S0.interior)


def deformed_min_sum(S1: SampledFunction, S2: SampledFunction, h: float) -> SampledFunction:
    """S1 (+)_h S2 = -h ln(exp(-S1/h) + exp(-S2/h)), the min-plus deformation."""
    _same_grid(S1, S2)
    if not h > 0:
        raise DomainError("h must be positive")
    v = -h * np.logaddexp(-S1.values / h, -S2.values / h)
    return SampledFunction(S1.origin, S1.step, v, "min_plus", S1.interior & S2.interior)


def shift(S: SampledFunction, c: float) -> SampledFunction:
    """Semiring scaling c * S, i.e. adding the constant c."""
    return replace(S, values=S.values + c)


CORPUS = {
    "quad": lambda y: y * y / 2.0,
    "abs": np.abs,
    "well": lambda y: (y * y - 1.0) ** 2 / 4.0,
}


@dataclass(frozen=True)
class GapRow:
    h: float
    gap: float
    argmax_x: float


def hj_gap_table(S0: SampledFunction, t: float, hs: Iterable[float],
                 window: tuple[float, float] = (-2.0, 2.0)) -> list[GapRow]:
    """Sup-norm gap between Cole-Hopf and Hopf-Lax solutions over ``window``."""
    ref = hopf_lax(S0, t)
    x = S0.grid
    sel = (x >= window[0] - 1e-12) & (x <= window[1] + 1e-12) & ref.interior
    rows = []
    for h in hs:
        sh = cole_hopf_evolve(S0, t, h)
        d = np.abs(sh.values - ref.values)[sel]
        k = int(np.argmax(d))
        rows.append(GapRow(float(h), float(d[k]), float(x[sel][k])))
    return rows


# -- file format ------------------------------------------------------------------------------

def parse_sampled(text: str) -> SampledFunction:
    """Header ``origin step count orientation``, then one value per line."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise ParseError("empty sampled-function file")
    head = lines[0].split()
    if len(head) != 4:
        raise ParseError("header must be 'origin step count orientation'")
    try:
        origin, step, count = float(head[0]), float(head[1]), int(head[2])
    except ValueError:
        raise ParseError("malformed header numbers") from None
    body = lines[1:]
    if len(body) != count:
        raise ParseError(f"expected {count} values, found {len(body)}")
    try:
        values = [parse_value(v) for v in body]
    except DomainError as exc:
        raise ParseError(str(exc)) from None
    return SampledFunction(origin, step, values, head[3])


def format_sampled(f: SampledFunction) -> str:
    out = [f"{format_value(f.origin)} {format_value(f.step)} {f.count} {f.orientation}"]
    out += [format_value(v) for v in f.values]
    return "\n".join(out) + "\n"

"""Built-in idempotent semirings, their standard order and residuation.

Payloads are plain floats (``-inf``/``+inf`` for the infinite elements);
Boolean payloads are ``bool``.  Array helpers operate on float64 arrays,
where Boolean values are stored as 0.0/1.0.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .errors import DomainError, NoBoundError, NotInvertibleError, UnsupportedCarrierError

NEG_INF = float("-inf")
POS_INF = float("inf")


class Kind(enum.Enum):
    RMAX = "rmax"
    RMAXHAT = "rmaxhat"
    RMIN = "rmin"
    RMINHAT = "rminhat"
    BOOL = "bool"
    MINMAX = "minmax"
    ZMAX = "zmax"


_MAXPLUS = {Kind.RMAX, Kind.RMAXHAT, Kind.ZMAX}
_MINPLUS = {Kind.RMIN, Kind.RMINHAT}
_MAXMIN = {Kind.BOOL, Kind.MINMAX}


@dataclass(frozen=True)
class SemiringDescriptor:
    kind: Kind
    has_zero: bool
    has_top: bool
    invertible_nonzero: bool

    # -- constants ---------------------------------------------------------

    @property
    def token(self) -> str:
        return self.kind.value

    @property
    def zero(self):
        if self.kind is Kind.BOOL:
            return False
        return POS_INF if self.kind in _MINPLUS else NEG_INF

    @property
    def one(self):
        if self.kind is Kind.BOOL:
            return True
        if self.kind is Kind.MINMAX:
            return POS_INF
        return 0.0

    @property
    def top(self):
        if not self.has_top:
            raise NoBoundError(f"{self.token} has no top element")
        if self.kind is Kind.BOOL:
            return True
        return NEG_INF if self.kind in _MINPLUS else POS_INF

    @property
    def family(self) -> str:
        """'maxplus', 'minplus' or 'maxmin': which kernel realizes the operations."""
        if self.kind in _MAXPLUS:
            return "maxplus"
        if self.kind in _MINPLUS:
            return "minplus"
        return "maxmin"

    @property
    def completion(self) -> "SemiringDescriptor":
        """The descriptor of the a-completion (adds the top where missing)."""
        if self.kind is Kind.RMAX or self.kind is Kind.ZMAX:
            return RMAXHAT
        if self.kind is Kind.RMIN:
            return RMINHAT
        return self

    # -- admissibility -----------------------------------------------------

    def check(self, a):
        """Return ``a`` normalized to this carrier or raise DomainError."""
        if self.kind is Kind.BOOL:
            if isinstance(a, (bool, np.bool_)):
                return bool(a)
            if isinstance(a, (int, float, np.integer, np.floating)) and a in (0, 1):
                return bool(a)
            raise DomainError(f"{a!r} is not a Boolean payload")
        try:
            x = float(a)
        except (TypeError, ValueError):
            raise DomainError(f"{a!r} is not a numeric payload") from None
        if math.isnan(x):
            raise DomainError("NaN is not a semiring value")
        if x == POS_INF and self.kind in (Kind.RMAX, Kind.ZMAX):
            raise DomainError(f"+inf is not admissible in {self.token}")
        if x == NEG_INF and self.kind is Kind.RMIN:
            raise DomainError(f"-inf is not admissible in {self.token}")
        if self.kind is Kind.ZMAX and math.isfinite(x) and not x.is_integer():
            raise DomainError(f"{a!r} is not an integer payload")
        return x

    def check_array(self, values) -> np.ndarray:
        arr = np.array(values, dtype=float)
        if np.isnan(arr).any():
            raise DomainError("NaN is not a semiring value")
        if self.kind is Kind.BOOL:
            if not np.isin(arr, (0.0, 1.0)).all():
                raise DomainError("Boolean arrays hold only 0/1")
        elif self.kind in (Kind.RMAX, Kind.ZMAX) and (arr == POS_INF).any():
            raise DomainError(f"+inf is not admissible in {self.token}")
        elif self.kind is Kind.RMIN and (arr == NEG_INF).any():
            raise DomainError(f"-inf is not admissible in {self.token}")
        if self.kind is Kind.ZMAX:
            fin = arr[np.isfinite(arr)]
            if (fin != np.round(fin)).any():
                raise DomainError("zmax arrays hold integers only")
        return arr

    # -- scalar operations -------------------------------------------------

    def add(self, a, b):
        a, b = self.check(a), self.check(b)
        if self.kind is Kind.BOOL:
            return a or b
        return min(a, b) if self.kind in _MINPLUS else max(a, b)

    def mul(self, a, b):
        a, b = self.check(a), self.check(b)
        if self.kind is Kind.BOOL:
            return a and b
        if self.kind is Kind.MINMAX:
            return min(a, b)
        z = self.zero
        if a == z or b == z:
            return z
        return a + b

    def leq(self, a, b) -> bool:
        return self.add(a, b) == self.check(b)

    def sup(self, xs: Iterable):
        acc = self.zero
        for x in xs:
            acc = self.add(acc, x)
        return acc

    def inf(self, xs: Iterable):
        xs = [self.check(x) for x in xs]
        if not xs:
            if not self.has_top:
                raise NoBoundError(f"inf of the empty set does not exist in {self.token}")
            return self.top
        if self.kind is Kind.BOOL:
            return all(xs)
        return max(xs) if self.kind in _MINPLUS else min(xs)

    def inv(self, a):
        a = self.check(a)
        if not self.invertible_nonzero:
            raise NotInvertibleError(f"{self.token} is not a division semiring")
        if a == self.zero:
            raise NotInvertibleError("ZERO has no inverse")
        if self.kind is Kind.BOOL:
            return True
        if self.has_top and a == self.top:
            raise NotInvertibleError("the top element is not invertible")
        return -a

    def residual(self, a, b):
        """inf{k : b <= k*a} in the standard order, valued in the completion."""
        a, b = self.check(a), self.check(b)
        if self.kind is Kind.BOOL:
            return b
        if self.kind is Kind.MINMAX:
            return b if b <= a else POS_INF
        r = b - a
        if math.isnan(r):
            return self.zero
        return r

    # -- array operations (float64, elementwise) ---------------------------

    def add_array(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return np.minimum(a, b) if self.kind in _MINPLUS else np.maximum(a, b)

    def mul_array(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if self.kind in _MAXMIN:
            return np.minimum(a, b)
        with np.errstate(invalid="ignore"):
            out = np.add(a, b)
        z = self.zero
        out[(np.asarray(a) == z) | (np.asarray(b) == z)] = z
        return out

    def residual_array(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        if self.kind is Kind.BOOL:
            return np.broadcast_to(b, np.broadcast(a, b).shape).copy()
        if self.kind is Kind.MINMAX:
            return np.where(b <= a, b, POS_INF)
        with np.errstate(invalid="ignore"):
            r = np.subtract(b, a)
        r[np.isnan(r)] = self.zero
        return r

    def leq_array(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return np.asarray(a) >= np.asarray(b) if self.kind in _MINPLUS else np.asarray(a) <= np.asarray(b)

    def sum_array(self, a: np.ndarray, axis=None):
        """Semiring sum (sup) along ``axis``; empty reductions give ZERO."""
        a = np.asarray(a, dtype=float)
        red = np.min if self.kind in _MINPLUS else np.max
        return red(a, axis=axis, initial=float(self.zero))

    def __repr__(self):
        return f"SemiringDescriptor({self.token})"


RMAX = SemiringDescriptor(Kind.RMAX, has_zero=True, has_top=False, invertible_nonzero=True)
RMAXHAT = SemiringDescriptor(Kind.RMAXHAT, has_zero=True, has_top=True, invertible_nonzero=True)
RMIN = SemiringDescriptor(Kind.RMIN, has_zero=True, has_top=False, invertible_nonzero=True)
RMINHAT = SemiringDescriptor(Kind.RMINHAT, has_zero=True, has_top=True, invertible_nonzero=True)
BOOL = SemiringDescriptor(Kind.BOOL, has_zero=True, has_top=True, invertible_nonzero=True)
MINMAX = SemiringDescriptor(Kind.MINMAX, has_zero=True, has_top=True, invertible_nonzero=False)
ZMAX = SemiringDescriptor(Kind.ZMAX, has_zero=True, has_top=False, invertible_nonzero=True)

DESCRIPTORS = {d.token: d for d in (RMAX, RMAXHAT, RMIN, RMINHAT, BOOL, MINMAX, ZMAX)}


def get_semiring(token: str) -> SemiringDescriptor:
    try:
        return DESCRIPTORS[token.lower()]
    except KeyError:
        raise DomainError(
            f"unknown semiring {token!r}; expected one of {', '.join(DESCRIPTORS)}"
        ) from None


# Free-function API; thin wrappers over the descriptor methods.

def sr_add(d: SemiringDescriptor, a, b):
    return d.add(a, b)


def sr_mul(d: SemiringDescriptor, a, b):
    return d.mul(a, b)


def sr_leq(d: SemiringDescriptor, a, b) -> bool:
    return d.leq(a, b)


def sr_inv(d: SemiringDescriptor, a):
    return d.inv(a)


def sr_sup(d: SemiringDescriptor, xs):
    return d.sup(xs)


def sr_inf(d: SemiringDescriptor, xs):
    return d.inf(xs)


def sr_residual(d: SemiringDescriptor, a, b):
    return d.residual(a, b)


def deformed_add(u: float, v: float, h: float) -> float:
    """Deformed sum ``h*ln(exp(u/h) + exp(v/h))``.

    Evaluated in the shifted form ``max(u, v) + h*log1p(exp(-|u-v|/h))`` so
    that it never overflows; tends to ``max(u, v)`` as ``h -> 0+``.
    """
    if not h > 0:
        raise DomainError(f"h must be positive, got {h!r}")
    u, v = float(u), float(v)
    if not (math.isfinite(u) and math.isfinite(v)):
        raise DomainError("deformed_add needs finite arguments")
    m = max(u, v)
    return m + h * math.log1p(math.exp(-abs(u - v) / h))


def deformed_add_array(u, v, h: float) -> np.ndarray:
    if not h > 0:
        raise DomainError(f"h must be positive, got {h!r}")
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return np.maximum(u, v) + h * np.log1p(np.exp(-np.abs(u - v) / h))


# -- adjoining a zero to a lattice-ordered group ----------------------------

@dataclass(frozen=True)
class OrderedGroup:
    """A totally ordered abelian group (carrier, +, <=) given operationally."""

    name: str
    carrier: str
    op: Callable[[float, float], float]
    leq: Callable[[float, float], bool]
    identity: float
    inverse: Callable[[float], float]
    sample: Callable[[np.random.Generator], float]


REALS_ADD = OrderedGroup(
    "(R,+,<=)", "reals", lambda a, b: a + b, lambda a, b: a <= b, 0.0, lambda a: -a,
    lambda rng: float(rng.uniform(-100, 100)),
)
INTEGERS_ADD = OrderedGroup(
    "(Z,+,<=)", "integers", lambda a, b: a + b, lambda a, b: a <= b, 0.0, lambda a: -a,
    lambda rng: float(rng.integers(-100, 101)),
)


@dataclass(frozen=True)
class AdjoinedSemiring:
    """The division semiring G_0: a group with a new absorbing bottom element."""

    group: OrderedGroup
    descriptor: SemiringDescriptor

    zero = NEG_INF

    @property
    def one(self) -> float:
        return self.group.identity

    def add(self, a, b):
        if a == self.zero:
            return b
        if b == self.zero:
            return a
        return b if self.group.leq(a, b) else a

    def mul(self, a, b):
        if a == self.zero or b == self.zero:
            return self.zero
        return self.group.op(a, b)

    def inv(self, a):
        if a == self.zero:
            raise NotInvertibleError("ZERO has no inverse")
        return self.group.inverse(a)

    def leq(self, a, b) -> bool:
        return self.add(a, b) == b

    def sample(self, rng: np.random.Generator, p_zero: float = 0.1):
        return self.zero if rng.random() < p_zero else self.group.sample(rng)


def adjoin_bottom(group: OrderedGroup) -> AdjoinedSemiring:
    """Adjoin an absorbing zero to ``group`` (reproduces RMax / ZMax)."""
    if group.carrier == "reals":
        return AdjoinedSemiring(group, RMAX)
    if group.carrier == "integers":
        return AdjoinedSemiring(group, ZMAX)
    raise UnsupportedCarrierError(f"unsupported group carrier {group.carrier!r}")


# -- text serialization ------------------------------------------------------

def format_value(x) -> str:
    """Round-trip-exact decimal text; infinities as '-inf'/'+inf'."""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    x = float(x)
    if x == POS_INF:
        return "+inf"
    if x == NEG_INF:
        return "-inf"
    if x.is_integer() and abs(x) < 2**53:
        return str(int(x))
    return repr(x)


def parse_value(token: str) -> float:
    t = token.strip().lower()
    if t in ("+inf", "inf", "+infinity", "infinity"):
        return POS_INF
    if t in ("-inf", "-infinity"):
        return NEG_INF
    try:
        x = float(t)
    except ValueError:
        raise DomainError(f"cannot parse value {token!r}") from None
    if math.isnan(x):
        raise DomainError("NaN is not a semiring value")
    return x

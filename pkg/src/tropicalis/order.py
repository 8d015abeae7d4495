"""Finite ordered structures: standard order, Up/Low, o-closure, the
Dedekind-MacNeille (normal) completion, axiom validators and completion of
finite semirings.

Subsets of an ``n``-element carrier are handled internally as int bitmasks;
public functions accept any iterable of indices and return ``frozenset``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import AxiomViolation, ParseError, RegularityError, SizeError
from .report import Report

MAX_ELEMENTS = 16
EXHAUSTIVE_LIMIT = 12


def _mask(xs: Iterable[int]) -> int:
    m = 0
    for x in xs:
        m |= 1 << int(x)
    return m


def _members(mask: int) -> frozenset[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return frozenset(out)


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class CayleyStructure:
    """A finite structure given by operation tables over indices 0..n-1."""

    n: int
    add_table: np.ndarray
    mul_table: np.ndarray | None = None
    zero_idx: int | None = None
    one_idx: int | None = None
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        n = self.n
        if not 1 <= n <= MAX_ELEMENTS:
            raise SizeError(f"structures are limited to 1..{MAX_ELEMENTS} elements, got {n}")
        add = np.array(self.add_table, dtype=np.int64)
        if add.shape != (n, n) or add.min() < 0 or add.max() >= n:
            raise ValueError("add_table must be an n x n table with entries in [0, n)")
        object.__setattr__(self, "add_table", _readonly(add))
        if self.mul_table is not None:
            mul = np.array(self.mul_table, dtype=np.int64)
            if mul.shape != (n, n) or mul.min() < 0 or mul.max() >= n:
                raise ValueError("mul_table must be an n x n table with entries in [0, n)")
            object.__setattr__(self, "mul_table", _readonly(mul))
        for name in ("zero_idx", "one_idx"):
            v = getattr(self, name)
            if v is not None and not 0 <= v < n:
                raise ValueError(f"{name}={v} out of range")
        labels = tuple(self.labels) or tuple(str(i) for i in range(n))
        if len(labels) != n:
            raise ValueError("need one label per element")
        object.__setattr__(self, "labels", labels)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CayleyStructure):
            return NotImplemented
        same_mul = (self.mul_table is None and other.mul_table is None) or (
            self.mul_table is not None and other.mul_table is not None
            and np.array_equal(self.mul_table, other.mul_table))
        return (self.n == other.n and np.array_equal(self.add_table, other.add_table) and same_mul
                and self.zero_idx == other.zero_idx and self.one_idx == other.one_idx
                and self.labels == other.labels)

    __hash__ = None

    def add(self, a: int, b: int) -> int:
        return int(self.add_table[a, b])

    def mul(self, a: int, b: int) -> int:
        return int(self.mul_table[a, b])

    def join(self, xs: Iterable[int]) -> int | None:
        """Sum of a subset; ``None`` for the empty set when there is no zero."""
        acc = None
        for x in xs:
            acc = x if acc is None else self.add(acc, x)
        if acc is None:
            return self.bottom()
        return acc

    def bottom(self) -> int | None:
        for x in range(self.n):
            if all(self.add_table[x, y] == y for y in range(self.n)):
                return x
        return None


@dataclass(frozen=True, eq=False)
class FinitePoset:
    n: int
    leq: np.ndarray
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        leq = np.array(self.leq, dtype=bool)
        if leq.shape != (self.n, self.n):
            raise ValueError("leq must be n x n")
        if not leq.diagonal().all():
            i = int(np.flatnonzero(~leq.diagonal())[0])
            raise AxiomViolation("reflexive", (i,))
        both = leq & leq.T
        np.fill_diagonal(both, False)
        if both.any():
            i, j = map(int, np.argwhere(both)[0])
            raise AxiomViolation("antisymmetric", (i, j))
        trans = (leq.astype(np.int64) @ leq.astype(np.int64)) > 0
        if (trans & ~leq).any():
            i, k = map(int, np.argwhere(trans & ~leq)[0])
            j = int(np.flatnonzero(leq[i] & leq[:, k])[0])
            raise AxiomViolation("transitive", (i, j, k))
        object.__setattr__(self, "leq", _readonly(leq))
        labels = tuple(self.labels) or tuple(str(i) for i in range(self.n))
        object.__setattr__(self, "labels", labels)
        up = tuple(_mask(np.flatnonzero(leq[x])) for x in range(self.n))
        down = tuple(_mask(np.flatnonzero(leq[:, x])) for x in range(self.n))
        object.__setattr__(self, "_up", up)
        object.__setattr__(self, "_down", down)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FinitePoset):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.leq, other.leq)

    __hash__ = None

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    def up_mask(self, xmask: int) -> int:
        m = self.full
        for x in _members(xmask):
            m &= self._up[x]
        return m

    def low_mask(self, xmask: int) -> int:
        m = self.full
        for x in _members(xmask):
            m &= self._down[x]
        return m

    def sup(self, xs: Iterable[int]) -> int | None:
        """Least upper bound of a subset, or None if it does not exist."""
        return self._least(self.up_mask(_mask(xs)))

    def inf(self, xs: Iterable[int]) -> int | None:
        return self._greatest(self.low_mask(_mask(xs)))

    def _least(self, m: int) -> int | None:
        for u in _members(m):
            if self._up[u] & m == m:
                return u
        return None

    def _greatest(self, m: int) -> int | None:
        for u in _members(m):
            if self._down[u] & m == m:
                return u
        return None

    @classmethod
    def from_relation(cls, n: int, pairs: Iterable[tuple[int, int]], labels=()) -> "FinitePoset":
        """Reflexive-transitive closure of the given ``(lower, upper)`` pairs."""
        r = np.eye(n, dtype=bool)
        for a, b in pairs:
            r[a, b] = True
        for k in range(n):
            r |= r[:, k : k + 1] & r[k : k + 1, :]
        return cls(n, r, labels)


# -- standard order and bound operators --------------------------------------

def validate_semigroup(s: CayleyStructure) -> Report:
    rep = Report("semigroup")
    _check_semigroup(s, rep)
    return rep


def _first(mask: np.ndarray):
    hits = np.argwhere(mask)
    return tuple(int(v) for v in hits[0]) if len(hits) else None


def _check_semigroup(s: CayleyStructure, rep: Report) -> None:
    A = s.add_table
    idx = np.arange(s.n)
    w = _first(A[idx, idx] != idx)
    rep.add("add_idempotent", w is None, w)
    w = _first(A != A.T)
    rep.add("add_commutative", w is None, w)
    w = _first(A[A[:, :, None], idx[None, None, :]] != A[idx[:, None, None], A[None, :, :]])
    rep.add("add_associative", w is None, w)


def standard_order(s: CayleyStructure) -> FinitePoset:
    """Poset with ``i <= j`` iff ``add[i][j] == j``."""
    rep = validate_semigroup(s)
    for c in rep.checks:
        if c.passed is False:
            raise AxiomViolation(c.name, c.witness)
    idx = np.arange(s.n)
    return FinitePoset(s.n, s.add_table == idx[None, :], s.labels)


def up_set(p: FinitePoset, X: Iterable[int]) -> frozenset[int]:
    """All upper bounds of X (the cut I(X)); the whole carrier for X empty."""
    return _members(p.up_mask(_mask(X)))


def low_set(p: FinitePoset, X: Iterable[int]) -> frozenset[int]:
    return _members(p.low_mask(_mask(X)))


def o_closure(p: FinitePoset, X: Iterable[int]) -> frozenset[int]:
    """Low(Up(X)); contains X and may be nonempty for X empty."""
    return _members(p.low_mask(p.up_mask(_mask(X))))


# -- normal completion --------------------------------------------------------

@dataclass(frozen=True)
class CutLattice:
    """Cuts of a finite poset ordered by reverse inclusion.

    ``masks[k]`` is the bitmask of cut ``k``; cut 0 is the bottom (the whole
    carrier).  ``embedding[x]`` is the index of ``Up({x})``.
    """

    poset: FinitePoset
    masks: tuple[int, ...]
    embedding: tuple[int, ...]
    _index: dict = field(repr=False, compare=False, default=None)

    def __post_init__(self):
        object.__setattr__(self, "_index", {m: k for k, m in enumerate(self.masks)})

    @property
    def cuts(self) -> list[frozenset[int]]:
        return [_members(m) for m in self.masks]

    def __len__(self) -> int:
        return len(self.masks)

    def index_of(self, members: Iterable[int]) -> int:
        return self._index[_mask(members)]

    def leq(self, i: int, j: int) -> bool:
        return self.masks[i] & self.masks[j] == self.masks[j]

    def join(self, ks: Iterable[int]) -> int:
        m = self.poset.full
        for k in ks:
            m &= self.masks[k]
        return self._index[m]

    def meet(self, ks: Iterable[int]) -> int:
        u = 0
        for k in ks:
            u |= self.masks[k]
        if not u:
            return self.top
        p = self.poset
        return self._index[p.up_mask(p.low_mask(u))]

    @property
    def bottom(self) -> int:
        return self._index[self.poset.full]

    @property
    def top(self) -> int:
        return min(range(len(self.masks)), key=lambda k: bin(self.masks[k]).count("1"))

    def cut_of(self, X: Iterable[int]) -> int:
        """Index of the cut I(X) = Up(X)."""
        return self._index[self.poset.up_mask(_mask(X))]

    def b_completion(self) -> list[int]:
        """Cuts majorized by some original element (the nonempty ones)."""
        return [k for k, m in enumerate(self.masks) if m]

    def as_poset(self) -> FinitePoset:
        m = len(self.masks)
        leq = np.array([[self.leq(i, j) for j in range(m)] for i in range(m)], dtype=bool)
        return FinitePoset(m, leq, tuple(self.label(k) for k in range(m)))

    def label(self, k: int) -> str:
        p = self.poset
        if k in self.embedding:
            return p.labels[self.embedding.index(k)]
        low = p.low_mask(self.masks[k])
        if not low:
            return "bot"
        maximal = [x for x in _members(low) if p._up[x] & low == 1 << x]
        return "sup{" + ",".join(p.labels[x] for x in sorted(maximal)) + "}"


def macneille_completion(p: FinitePoset) -> CutLattice:
    """All cuts I(X), X a subset of the carrier, as a complete lattice.

    Cuts are exactly the intersections of principal filters (with the whole
    carrier as the empty intersection), i.e. the fixed points of Up∘Low.
    """
    if p.n > MAX_ELEMENTS:
        raise SizeError(f"completion is limited to {MAX_ELEMENTS} elements")
    cuts = {p.full}
    for x in range(p.n):
        cuts |= {c & p._up[x] for c in cuts}
    for c in cuts:
        assert p.up_mask(p.low_mask(c)) == c
    # bottom (largest set) first, then deterministic
    ordered = tuple(sorted(cuts, key=lambda m: (-bin(m).count("1"), sorted(_members(m)))))
    index = {m: k for k, m in enumerate(ordered)}
    embedding = tuple(index[p._up[x]] for x in range(p.n))
    return CutLattice(p, ordered, embedding)


def check_complete_lattice(p: FinitePoset) -> tuple[bool, frozenset[int] | None]:
    """Exhaustively check that every subset has a sup and an inf.

    Returns ``(ok, witness_subset)``.  Above 16 elements only pairs plus the
    empty set are checked, which is equivalent for finite posets.
    """
    n = p.n
    up = np.array(p._up, dtype=np.int64)
    down = np.array(p._down, dtype=np.int64)
    if n > 16:
        subsets = [0] + [_mask(pair) for pair in itertools.combinations(range(n), 2)]
        for sm in subsets:
            if p._least(p.up_mask(sm)) is None or p._greatest(p.low_mask(sm)) is None:
                return False, _members(sm)
        return True, None
    for bounds, other in ((up, up), (down, down)):
        acc = np.array([p.full], dtype=np.int64)
        for b in range(n):
            acc = np.concatenate([acc, acc & bounds[b]])
        has = np.zeros(acc.shape[0], dtype=bool)
        for u in range(n):
            has |= ((acc >> u) & 1).astype(bool) & ((acc & ~other[u]) == 0)
        if not has.all():
            return False, _members(int(np.flatnonzero(~has)[0]))
    return True, None


def is_order_isomorphic_embedding(lat: CutLattice) -> bool:
    """True when the embedding is a bijection onto the cuts (S already complete)."""
    return sorted(lat.embedding) == list(range(len(lat)))


def product_poset(p: FinitePoset, q: FinitePoset) -> FinitePoset:
    """Componentwise order on p x q; element (i, j) has index i*q.n + j."""
    leq = np.einsum("ik,jl->ijkl", p.leq, q.leq).reshape(p.n * q.n, p.n * q.n)
    labels = tuple(f"({a},{b})" for a in p.labels for b in q.labels)
    return FinitePoset(p.n * q.n, leq.astype(bool), labels)


# -- semiring validators ------------------------------------------------------

def validate_semiring(s: CayleyStructure) -> Report:
    rep = Report("semiring")
    _check_semiring(s, rep)
    return rep


def _check_semiring(s: CayleyStructure, rep: Report) -> None:
    if s.mul_table is None:
        raise ValueError("semiring validation needs a mul table")
    _check_semigroup(s, rep)
    A, M = s.add_table, s.mul_table
    idx = np.arange(s.n)
    x = idx[:, None, None]
    y = idx[None, :, None]
    z = idx[None, None, :]
    w = _first(M[M[x, y], z] != M[x, M[y, z]])
    rep.add("mul_associative", w is None, w)
    w = _first(M[x, A[y, z]] != A[M[x, y], M[x, z]])
    rep.add("left_distributive", w is None, w)
    w = _first(M[A[y, z], x] != A[M[y, x], M[z, x]])
    rep.add("right_distributive", w is None, w)
    if s.one_idx is None:
        rep.add("unit_left", None, note="no unit given")
        rep.add("unit_right", None, note="no unit given")
    else:
        o = s.one_idx
        w = _first(M[o, idx] != idx)
        rep.add("unit_left", w is None, w)
        w = _first(M[idx, o] != idx)
        rep.add("unit_right", w is None, w)
    if s.zero_idx is None:
        for name in ("zero_neutral", "zero_absorbing_left", "zero_absorbing_right"):
            rep.add(name, None, note="no zero given")
    else:
        z0 = s.zero_idx
        w = _first(A[z0, idx] != idx)
        rep.add("zero_neutral", w is None, w)
        w = _first(M[z0, idx] != z0)
        rep.add("zero_absorbing_left", w is None, w)
        w = _first(M[idx, z0] != z0)
        rep.add("zero_absorbing_right", w is None, w)


def validate_semifield(s: CayleyStructure) -> Report:
    """Semiring axioms plus commutative product, inverses of nonzero elements and 0 != 1."""
    rep = Report("semifield")
    _check_semiring(s, rep)
    M = s.mul_table
    w = _first(M != M.T)
    rep.add("mul_commutative", w is None, w)
    if s.one_idx is None:
        rep.add("nonzero_invertible", False, note="no unit given")
    else:
        missing = None
        for a in range(s.n):
            if a == s.zero_idx:
                continue
            if not any(M[a, b] == s.one_idx and M[b, a] == s.one_idx for b in range(s.n)):
                missing = (a,)
                break
        rep.add("nonzero_invertible", missing is None, missing)
    distinct = s.zero_idx is not None and s.one_idx is not None and s.zero_idx != s.one_idx
    rep.add("zero_ne_one", distinct, None if distinct else (s.zero_idx, s.one_idx))
    return rep


def is_integrally_closed(s: CayleyStructure) -> Report:
    """For every x: if the powers x, x^2, ... are bounded above then x <= 1."""
    if s.mul_table is None or s.one_idx is None:
        raise ValueError("integral closure needs a mul table and a unit")
    p = standard_order(s)
    rep = Report("integrally-closed")
    for x in range(s.n):
        powers, cur = [], x
        while cur not in powers:
            powers.append(cur)
            cur = s.mul(cur, x)
        bounded = p.up_mask(_mask(powers)) != 0
        ok = (not bounded) or bool(p.leq[x, s.one_idx])
        rep.add(f"element {s.labels[x]}", ok, None if ok else (x,),
                note=f"powers={{{','.join(s.labels[v] for v in sorted(powers))}}}")
    return rep


# -- homomorphisms -------------------------------------------------------------

@dataclass
class HomReport:
    plain: bool
    a_hom: bool
    b_hom: bool
    a_regular: bool
    zero_preserving: bool
    mode: str
    witnesses: dict = field(default_factory=dict)

    def lines(self) -> list[str]:
        out = [f"mode={self.mode}"]
        for k in ("plain", "a_hom", "b_hom", "a_regular", "zero_preserving"):
            v = getattr(self, k)
            out.append(f"{k}={'yes' if v else 'no'}" + (f" witness={self.witnesses[k]}" if k in self.witnesses else ""))
        return out


def _subsets(n: int, rng_seed: int = 0, samples: int = 4096):
    if n <= EXHAUSTIVE_LIMIT:
        return range(1 << n), "exhaustive"
    rng = np.random.default_rng(rng_seed)
    ms = {0, (1 << n) - 1} | {1 << i for i in range(n)}
    ms |= {int(v) for v in rng.integers(0, 1 << n, size=samples)}
    return sorted(ms), f"sampled({len(ms)} subsets)"


def is_a_homomorphism(f: Sequence[int] | Callable[[int], int], s: CayleyStructure,
                      t: CayleyStructure) -> HomReport:
    """Check sup preservation g(sum X) = sum g(X) for every subset X of s.

    Comparisons are made in the normal completion of t, so an empty X is
    handled as "zero goes to zero".  Subsets whose sum does not exist in s
    (the empty set when s has no zero) are vacuous.
    """
    fmap = [int(f(x)) for x in range(s.n)] if callable(f) else [int(v) for v in f]
    if len(fmap) != s.n or min(fmap) < 0 or max(fmap) >= t.n:
        raise ValueError("index map does not fit the structures")
    ps, pt = standard_order(s), standard_order(t)
    wit: dict = {}

    plain = True
    for a in range(s.n):
        for b in range(s.n):
            if fmap[s.add(a, b)] != t.add(fmap[a], fmap[b]):
                plain = False
                wit["plain"] = (a, b)
                break
        if not plain:
            break

    subsets, mode = _subsets(s.n)
    a_hom = b_hom = a_reg = True
    for xm in subsets:
        X = _members(xm)
        img = _mask(fmap[x] for x in X)
        sx = ps.sup(X)
        if sx is not None and pt._up[fmap[sx]] != pt.up_mask(img):
            if a_hom:
                a_hom = False
                wit["a_hom"] = tuple(sorted(X))
            if b_hom and ps.up_mask(xm):
                b_hom = False
                wit["b_hom"] = tuple(sorted(X))
        closure = ps.low_mask(ps.up_mask(xm))
        fclos = _mask(fmap[x] for x in _members(closure))
        target = pt.low_mask(pt.up_mask(img))
        if a_reg and fclos & ~target:
            a_reg = False
            wit["a_regular"] = tuple(sorted(X))
    zs, zt = ps.sup(()), pt.sup(())
    zero_ok = zs is None or (zt is not None and fmap[zs] == zt)
    if not zero_ok:
        wit["zero_preserving"] = (zs,)
    return HomReport(plain, a_hom, b_hom, a_reg, zero_ok, mode, wit)


def complete_semiring(s: CayleyStructure) -> CayleyStructure:
    """Semiring on the cut lattice with the product extended by sups.

    For cuts C, D the product is sup{ a*b : a <= C, b <= D } taken in the
    completion; requires both homotheties of every element to preserve sups.
    """
    rep = validate_semiring(s)
    if not rep.ok:
        c = rep.failures()[0]
        raise AxiomViolation(c.name, c.witness)
    for y in range(s.n):
        for side, fn in (("left", lambda x, y=y: s.mul(y, x)), ("right", lambda x, y=y: s.mul(x, y))):
            hr = is_a_homomorphism(fn, s, s)
            if not hr.a_hom:
                raise RegularityError(
                    f"{side} homothety of {s.labels[y]} does not preserve sups",
                    witness=(side, y, hr.witnesses.get("a_hom")),
                )
    p = standard_order(s)
    lat = macneille_completion(p)
    m = len(lat)
    if m > MAX_ELEMENTS:
        raise SizeError(f"completion has {m} elements (limit {MAX_ELEMENTS})")
    add = np.empty((m, m), dtype=np.int64)
    mul = np.empty((m, m), dtype=np.int64)
    lows = [_members(p.low_mask(c)) for c in lat.masks]
    for i in range(m):
        for j in range(m):
            add[i, j] = lat.join((i, j))
            prod = p.full
            for a in lows[i]:
                for b in lows[j]:
                    prod &= p._up[s.mul(a, b)]
            mul[i, j] = lat._index[prod]
    one = lat.embedding[s.one_idx] if s.one_idx is not None else None
    return CayleyStructure(m, add, mul, lat.bottom, one, tuple(lat.label(k) for k in range(m)))


# -- text format -----------------------------------------------------------------

def parse_cayley(text: str) -> CayleyStructure:
    """Parse the line-oriented table format (``n=``, ``labels=``, ``add=``, ``mul=``, ``zero=``, ``one=``)."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    fields: dict = {}
    i = 0
    n = None
    while i < len(lines):
        key, sep, val = lines[i].partition("=")
        key = key.strip().lower()
        if not sep:
            raise ParseError(f"expected key=value, got {lines[i]!r}")
        if key == "n":
            n = int(val)
        elif key == "labels":
            fields["labels"] = tuple(v.strip() for v in val.split(","))
        elif key in ("add", "mul"):
            if n is None:
                raise ParseError("n= must precede the tables")
            rows = [val.split()] if val.strip() else []
            while len(rows) < n:
                i += 1
                if i >= len(lines):
                    raise ParseError(f"{key} table is truncated")
                rows.append(lines[i].split())
            try:
                fields[key] = [[int(v) for v in r] for r in rows]
            except ValueError as exc:
                raise ParseError(str(exc)) from None
        elif key in ("zero", "one"):
            fields[key] = int(val)
        else:
            raise ParseError(f"unknown key {key!r}")
        i += 1
    if n is None or "add" not in fields:
        raise ParseError("need n= and an add= table")
    try:
        return CayleyStructure(n, fields["add"], fields.get("mul"), fields.get("zero"),
                               fields.get("one"), fields.get("labels", ()))
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def format_cayley(s: CayleyStructure) -> str:
    out = [f"n={s.n}", "labels=" + ",".join(s.labels), "add="]
    out += [" ".join(str(int(v)) for v in row) for row in s.add_table]
    if s.mul_table is not None:
        out.append("mul=")
        out += [" ".join(str(int(v)) for v in row) for row in s.mul_table]
    if s.zero_idx is not None:
        out.append(f"zero={s.zero_idx}")
    if s.one_idx is not None:
        out.append(f"one={s.one_idx}")
    return "\n".join(out) + "\n"

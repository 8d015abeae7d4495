"""Dense vectors and matrices over the built-in semirings.

Matrix products and closures dispatch to the kernels in :mod:`.kernels`.
Min-plus work is done in the max-plus kernels on negated payloads, which is
exact.  Boolean and min-max share the max-min kernels.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from . import kernels
from .errors import DivergenceError, GraphError, ParseError, ShapeError
from .report import Report
from .semiring import (
    BOOL,
    NEG_INF,
    POS_INF,
    SemiringDescriptor,
    format_value,
    get_semiring,
    parse_value,
)


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class TropVector:
    d: SemiringDescriptor
    values: np.ndarray

    def __post_init__(self):
        v = self.d.check_array(self.values)
        if v.ndim != 1:
            raise ShapeError(f"vector payload must be 1-D, got shape {v.shape}")
        object.__setattr__(self, "values", _frozen(v))

    def __len__(self) -> int:
        return self.values.shape[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, TropVector):
            return NotImplemented
        return self.d == other.d and np.array_equal(self.values, other.values)

    __hash__ = None

    def __repr__(self) -> str:
        return f"TropVector({self.d.token}, [{', '.join(format_value(x) for x in self.values)}])"


@dataclass(frozen=True, eq=False)
class TropMatrix:
    d: SemiringDescriptor
    values: np.ndarray

    def __post_init__(self):
        v = self.d.check_array(self.values)
        if v.ndim != 2:
            raise ShapeError(f"matrix payload must be 2-D, got shape {v.shape}")
        object.__setattr__(self, "values", _frozen(v))

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def cols(self) -> int:
        return self.values.shape[1]

    def __eq__(self, other) -> bool:
        if not isinstance(other, TropMatrix):
            return NotImplemented
        return self.d == other.d and np.array_equal(self.values, other.values)

    __hash__ = None

    def __repr__(self) -> str:
        body = "; ".join(" ".join(format_value(x) for x in row) for row in self.values)
        return f"TropMatrix({self.d.token}, [{body}])"


def identity(d: SemiringDescriptor, n: int) -> TropMatrix:
    a = np.full((n, n), float(d.zero))
    np.fill_diagonal(a, float(d.one))
    return TropMatrix(d, a)


def zeros(d: SemiringDescriptor, rows: int, cols: int) -> TropMatrix:
    return TropMatrix(d, np.full((rows, cols), float(d.zero)))


def _same(d1: SemiringDescriptor, d2: SemiringDescriptor) -> SemiringDescriptor:
    if d1 != d2:
        raise ShapeError(f"descriptor mismatch: {d1.token} vs {d2.token}")
    return d1


# -- raw array kernels (no validation) -------------------------------------

def _matmul(d: SemiringDescriptor, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    if A.shape[1] == 0:
        return np.full((A.shape[0], B.shape[1]), float(d.zero))
    fam = d.family
    if fam == "maxplus":
        return kernels.maxplus_matmul(A, B)
    if fam == "minplus":
        return -kernels.maxplus_matmul(-A, -B)
    out = kernels.maxmin_matmul(A, B)
    return np.maximum(out, 0.0) if d is BOOL else out


def _closure(d: SemiringDescriptor, A: np.ndarray) -> np.ndarray:
    """Transitive closure A (+) A^2 (+) ... in the max-plus or max-min view."""
    if d.family == "maxmin":
        D = kernels.maxmin_closure(A)
        return np.maximum(D, 0.0) if d is BOOL else D
    return kernels.maxplus_closure(A)


# -- public algebra ----------------------------------------------------------

def mat_add(A: TropMatrix, B: TropMatrix) -> TropMatrix:
    d = _same(A.d, B.d)
    if A.shape != B.shape:
        raise ShapeError(f"cannot add {A.shape} and {B.shape}")
    return TropMatrix(d, d.add_array(A.values, B.values))


def mat_mul(A: TropMatrix, B: TropMatrix) -> TropMatrix:
    d = _same(A.d, B.d)
    if A.cols != B.rows:
        raise ShapeError(f"cannot multiply {A.shape} by {B.shape}")
    return TropMatrix(d, _matmul(d, A.values, B.values))


def mat_vec(A: TropMatrix, x: TropVector) -> TropVector:
    d = _same(A.d, x.d)
    if A.cols != len(x):
        raise ShapeError(f"cannot apply {A.shape} to a vector of length {len(x)}")
    return TropVector(d, _matmul(d, A.values, x.values[:, None])[:, 0])


def vec_add(x: TropVector, y: TropVector) -> TropVector:
    d = _same(x.d, y.d)
    if len(x) != len(y):
        raise ShapeError(f"length mismatch {len(x)} vs {len(y)}")
    return TropVector(d, d.add_array(x.values, y.values))


def vec_scale(k, x: TropVector) -> TropVector:
    d = x.d
    k = float(d.check(k))
    return TropVector(d, d.mul_array(np.full(len(x), k), x.values))


def _positive_cycle(W: np.ndarray) -> list[int]:
    """A cycle of positive total weight in the max-plus weight matrix ``W``.

    Bellman-Ford from a virtual source joined to every node; a node still
    improving in pass n leads, after n predecessor steps, onto a cycle.
    """
    n = W.shape[0]
    dist = np.zeros(n)
    pred = np.full(n, -1)
    last = -1
    for _ in range(n):
        with np.errstate(invalid="ignore"):
            cand = dist[:, None] + W
        cand[np.isneginf(W)] = NEG_INF
        best = cand.argmax(axis=0)
        val = cand[best, np.arange(n)]
        better = val > dist
        if not better.any():
            return []
        dist[better] = val[better]
        pred[better] = best[better]
        last = int(np.flatnonzero(better)[0])
    v = last
    for _ in range(n):
        v = int(pred[v])
    cycle = [v]
    u = int(pred[v])
    while u != v:
        cycle.append(u)
        u = int(pred[u])
    cycle.append(v)
    return cycle[::-1]


def kleene_star(A: TropMatrix) -> TropMatrix:
    """A* = I (+) A (+) A^2 (+) ... by in-place Floyd-Warshall closure.

    Over max-plus (min-plus) semirings a positive (negative) cycle makes the
    series diverge.  Without a top element that is a DivergenceError whose
    ``cycle`` lists the node sequence; in the completed semirings the
    affected entries are set to the top instead.
    """
    d = A.d
    n, m = A.shape
    if n != m:
        raise ShapeError(f"star needs a square matrix, got {A.shape}")
    if d.family == "maxmin":
        D = _closure(d, A.values)
        return TropMatrix(d, np.maximum(D, identity(d, n).values))
    sign = 1.0 if d.family == "maxplus" else -1.0
    W = sign * A.values
    D = _closure(d, W)
    pump = np.diagonal(D) > 0
    if pump.any():
        if not d.has_top:
            cycle = _positive_cycle(W)
            kind = "positive" if sign > 0 else "negative"
            raise DivergenceError(f"star diverges: {kind} cycle {cycle}", cycle=cycle)
        reach = (D > NEG_INF) | np.eye(n, dtype=bool)
        hit = (reach[:, pump].astype(np.int64) @ reach[pump, :].astype(np.int64)) > 0
        D[hit] = POS_INF
    D = np.maximum(D, np.where(np.eye(n, dtype=bool), 0.0, NEG_INF))
    return TropMatrix(d, sign * D + 0.0)  # + 0.0 clears negative zeros


# -- Bellman equation ------------------------------------------------------------

METHODS = ("jacobi", "gauss_seidel", "closure")


@dataclass(frozen=True)
class BellmanSolution:
    X: TropMatrix
    method: str
    iterations: int
    converged: bool


def _divergence(H: TropMatrix, method: str, sweeps: int) -> DivergenceError:
    d = H.d
    W = H.values if d.family == "maxplus" else -H.values
    W = np.where(W == POS_INF, NEG_INF, W)  # a top entry cannot form a finite witness
    cycle = _positive_cycle(W) if d.family != "maxmin" else []
    return DivergenceError(f"{method} did not reach a fixed point in {sweeps} sweeps; cycle {cycle}",
                           cycle=cycle)


def solve_bellman(H: TropMatrix, F: TropMatrix, method: str = "closure") -> BellmanSolution:
    """Least solution of X = H X (+) F.

    ``jacobi`` iterates X <- H X (+) F from X = F, ``gauss_seidel`` updates
    rows in place, ``closure`` returns H* F.  The iterative methods give up
    after n + 1 sweeps, past the Bellman-Ford bound.
    """
    d = _same(H.d, F.d)
    n = H.rows
    if H.cols != n:
        raise ShapeError(f"H must be square, got {H.shape}")
    if F.rows != n:
        raise ShapeError(f"F has {F.rows} rows, H has {n}")
    if method == "closure":
        X = mat_mul(kleene_star(H), F)
        return BellmanSolution(X, method, n, True)
    h, f = H.values, F.values
    cap = n + 1
    if method == "jacobi":
        X = f.copy()
        for it in range(1, cap + 1):
            Xn = d.add_array(_matmul(d, h, X), f)
            if np.array_equal(Xn, X):
                return BellmanSolution(TropMatrix(d, X), method, it, True)
            X = Xn
        raise _divergence(H, method, cap)
    if method == "gauss_seidel":
        X = f.copy()
        for it in range(1, cap + 1):
            changed = False
            for i in range(n):
                row = d.add_array(_matmul(d, h[i : i + 1], X)[0], f[i])
                if not np.array_equal(row, X[i]):
                    X[i] = row
                    changed = True
            if not changed:
                return BellmanSolution(TropMatrix(d, X), method, it, True)
        raise _divergence(H, method, cap)
    raise ValueError(f"unknown method {method!r}; expected one of {', '.join(METHODS)}")


# -- graphs -------------------------------------------------------------------

@dataclass(frozen=True)
class Graph:
    n: int
    edges: tuple[tuple[int, int, float], ...]

    def adjacency(self, d: SemiringDescriptor) -> TropMatrix:
        """A[u, v] = w, parallel edges combined with the semiring sum."""
        a = np.full((self.n, self.n), float(d.zero))
        for u, v, w in self.edges:
            a[u, v] = d.add_array(a[u, v], d.check(w))
        return TropMatrix(d, a)


def parse_graph(text: str, n: int | None = None) -> Graph:
    """Edge list ``u v w`` per line; ``#`` starts a comment."""
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ParseError(f"line {lineno}: expected 'u v w', got {raw!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"line {lineno}: node ids must be integers") from None
        if u < 0 or v < 0:
            raise ParseError(f"line {lineno}: node ids must be nonnegative")
        edges.append((u, v, parse_value(parts[2])))
    size = max([max(u, v) + 1 for u, v, _ in edges], default=0)
    if n is not None:
        if n < size:
            raise ParseError(f"node count {n} is smaller than the largest id + 1 ({size})")
        size = n
    return Graph(size, tuple(edges))


def _acyclic(g: Graph) -> bool:
    indeg = [0] * g.n
    succ: list[list[int]] = [[] for _ in range(g.n)]
    for u, v, _ in g.edges:
        succ[u].append(v)
        indeg[v] += 1
    queue = deque(i for i in range(g.n) if indeg[i] == 0)
    seen = 0
    while queue:
        u = queue.popleft()
        seen += 1
        for v in succ[u]:
            indeg[v] -= 1
            if indeg[v] == 0:
                queue.append(v)
    return seen == g.n


@dataclass(frozen=True)
class PathResult:
    d: SemiringDescriptor
    source: int
    distances: np.ndarray
    predecessors: tuple[int, ...]

    def path_to(self, target: int) -> list[int] | None:
        """Node sequence from the source, or None if unreachable."""
        if self.distances[target] == self.d.zero:
            return None
        path = [target]
        while path[-1] != self.source:
            p = self.predecessors[path[-1]]
            if p < 0:
                return None
            path.append(p)
        return path[::-1]


def shortest_paths(g: Graph, source: int, d: SemiringDescriptor) -> PathResult:
    """Optimal path values from ``source`` (row ``source`` of A*).

    Predecessors follow tight edges along a breadth-first layering so that
    every reported path is also one with the fewest edges among optimal
    ones; ties go to the smallest node index.
    """
    if not 0 <= source < g.n:
        raise GraphError(f"source {source} is not a node (graph has {g.n})")
    if d.family == "maxplus" and not _acyclic(g):
        raise GraphError("longest paths are only defined on acyclic graphs")
    A = g.adjacency(d)
    dist = kleene_star(A).values[source].copy()
    av = A.values
    live = dist != d.zero
    prod = d.mul_array(np.repeat(dist[:, None], g.n, axis=1), av)
    tight = (av != d.zero) & live[:, None] & (prod == dist[None, :])
    hop = np.full(g.n, -1)
    hop[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in np.flatnonzero(tight[u]):
            if hop[v] < 0:
                hop[v] = hop[u] + 1
                queue.append(int(v))
    pred = [-1] * g.n
    for v in range(g.n):
        if v == source or hop[v] < 0:
            continue
        cands = np.flatnonzero(tight[:, v] & (hop == hop[v] - 1))
        pred[v] = int(cands[0])
    return PathResult(d, source, _frozen(dist), tuple(pred))


# -- semimodule validator -----------------------------------------------------------

def validate_semimodule(
    d: SemiringDescriptor,
    dim: int = 3,
    samples: int = 1000,
    seed: int = 0,
    action: Callable[[float, np.ndarray], np.ndarray] | None = None,
    sampler: Callable[[np.random.Generator], np.ndarray] | None = None,
    member: Callable[[np.ndarray], bool] | None = None,
    scalar_sampler: Callable[[np.random.Generator], float] | None = None,
) -> Report:
    """Check the semimodule laws for a scalar action on vectors over ``d``.

    By default the action is the coordinatewise product on the free module
    of dimension ``dim`` and vectors are drawn from integer payloads with
    occasional ZERO and top entries.  ``sampler`` draws vectors from a
    custom set and ``member`` additionally checks that the set is closed
    under the vector sum and under the action.  ``scalar_sampler`` restricts
    the scalars, e.g. to a subgroup.
    """
    rng = np.random.default_rng(seed)
    act = action or (lambda k, x: d.mul_array(np.full(x.shape, k), x))
    scalar_pool = [float(d.zero)]

    def scalar() -> float:
        if scalar_sampler is not None:
            return float(scalar_sampler(rng))
        if d is BOOL:
            return float(rng.integers(0, 2))
        if d.family == "maxmin":
            return float(rng.choice([NEG_INF, POS_INF, *range(-5, 6)]))
        return scalar_pool[0] if rng.random() < 0.1 else float(rng.integers(-5, 6))

    def vector() -> np.ndarray:
        if sampler is not None:
            return np.asarray(sampler(rng), dtype=float)
        if d is BOOL:
            return rng.integers(0, 2, size=dim).astype(float)
        v = rng.integers(-5, 6, size=dim).astype(float)
        v[rng.random(dim) < 0.1] = float(d.zero)
        if d.has_top:
            v[rng.random(dim) < 0.05] = float(d.top)
        return v

    add = d.add_array
    checks = {
        "mul_assoc": lambda k1, k2, x, y: np.array_equal(act(d.mul(k1, k2), x), act(k1, act(k2, x))),
        "scalar_distributive": lambda k1, k2, x, y: np.array_equal(act(d.add(k1, k2), x),
                                                                   add(act(k1, x), act(k2, x))),
        "vector_distributive": lambda k1, k2, x, y: np.array_equal(act(k1, add(x, y)),
                                                                   add(act(k1, x), act(k1, y))),
        "unit": lambda k1, k2, x, y: np.array_equal(act(d.one, x), x),
        "zero_scalar": lambda k1, k2, x, y: np.array_equal(act(d.zero, x), np.full(x.shape, float(d.zero))),
    }
    if d.has_top or d.family != "maxmin":
        def _standard(k1, k2, x, y):
            if d.has_top and np.all(x == float(d.top)):
                return True
            q = [k1, k2, scalar()]
            lhs = act(d.inf(q), x)
            rhs = act(q[0], x)
            for k in q[1:]:
                rhs = np.minimum(rhs, act(k, x)) if d.family != "minplus" else np.maximum(rhs, act(k, x))
            return np.array_equal(lhs, rhs)
        checks["inf_standard"] = _standard
    if member is not None:
        checks["closed_sum"] = lambda k1, k2, x, y: bool(member(add(x, y)))
        checks["closed_action"] = lambda k1, k2, x, y: bool(member(act(k1, x)))

    failures: dict[str, tuple] = {}
    for _ in range(samples):
        k1, k2, x, y = scalar(), scalar(), vector(), vector()
        for name, fn in checks.items():
            if name not in failures and not fn(k1, k2, x, y):
                failures[name] = (k1, k2, tuple(x), tuple(y))
    rep = Report("semimodule")
    for name in checks:
        rep.add(name, name not in failures, failures.get(name), note=f"samples={samples}")
    return rep


# -- matrix file format --------------------------------------------------------------

def parse_matrix(text: str) -> TropMatrix:
    """First line ``rows cols semiring``, then whitespace-separated rows."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise ParseError("empty matrix file")
    head = lines[0].split()
    if len(head) != 3:
        raise ParseError("header must be 'rows cols semiring'")
    try:
        r, c = int(head[0]), int(head[1])
    except ValueError:
        raise ParseError("rows and cols must be integers") from None
    d = get_semiring(head[2])
    body = lines[1:]
    if len(body) != r:
        raise ParseError(f"expected {r} rows, found {len(body)}")
    vals = []
    for i, ln in enumerate(body):
        toks = ln.split()
        if len(toks) != c:
            raise ParseError(f"row {i} has {len(toks)} entries, expected {c}")
        vals.append([parse_value(t) for t in toks])
    return TropMatrix(d, np.array(vals, dtype=float).reshape(r, c))


def format_matrix(A: TropMatrix) -> str:
    out = [f"{A.rows} {A.cols} {A.d.token}"]
    out += [" ".join(format_value(x) for x in row) for row in A.values]
    return "\n".join(out) + "\n"


def parse_vector(text: str, d: SemiringDescriptor) -> TropVector:
    toks = [t for ln in text.splitlines() for t in ln.split("#", 1)[0].split()]
    return TropVector(d, np.array([parse_value(t) for t in toks], dtype=float))


def vectors_from_rows(A: TropMatrix) -> list[TropVector]:
    return [TropVector(A.d, row.copy()) for row in A.values]


def from_rows(d: SemiringDescriptor, rows: Sequence[Iterable[float]]) -> TropMatrix:
    return TropMatrix(d, np.array([list(r) for r in rows], dtype=float))

"""Command-line entry point.

Exit codes: 0 success, 1 domain error (one JSON record on stderr), 2 usage
error.  Numbers print in round-trip-exact decimal with ``-inf``/``+inf``.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import calculus, duality, linalg, order
from .errors import TropicalisError
from .semiring import DESCRIPTORS, RMAXHAT, format_value, get_semiring

FORMATS = ("text", "csv", "jsonl")


def _jv(x):
    """JSON value: infinities as strings, integral floats as ints."""
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (float, np.floating)):
        s = format_value(float(x))
        if "inf" in s:
            return s
        return int(s) if s.lstrip("-").isdigit() else float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    return x


def _cell(x) -> str:
    if isinstance(x, (float, np.floating)):
        return format_value(float(x))
    if isinstance(x, (np.integer,)):
        return str(int(x))
    return str(x)


class Emitter:
    def __init__(self, fmt: str, columns: Sequence[str], text: Callable[[dict], str], out,
                 meta: dict | None = None):
        self.fmt, self.columns, self.text, self.out = fmt, list(columns), text, out
        if meta:
            self.header(**meta)
        if fmt == "csv":
            self.writer = csv.writer(out, lineterminator="\n")
            self.writer.writerow(self.columns)

    def header(self, **meta) -> None:
        if self.fmt == "jsonl":
            self.out.write(json.dumps({k: _jv(v) for k, v in meta.items()}) + "\n")
        else:
            self.out.write("# " + " ".join(f"{k}={_cell(v)}" for k, v in meta.items()) + "\n")

    def row(self, rec: dict) -> None:
        if self.fmt == "csv":
            self.writer.writerow([_cell(rec[c]) for c in self.columns])
        elif self.fmt == "jsonl":
            self.out.write(json.dumps({c: _jv(rec[c]) for c in self.columns}) + "\n")
        else:
            self.out.write(self.text(rec) + "\n")


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise FileNotFoundError(f"cannot read {path}: {exc.strerror}") from None


# -- subcommands --------------------------------------------------------------------

def cmd_validate(a, out) -> int:
    s = order.parse_cayley(_read(a.file))
    if a.semifield:
        rep = order.validate_semifield(s)
    elif a.semiring:
        rep = order.validate_semiring(s)
    elif a.integrally_closed:
        rep = order.is_integrally_closed(s)
    else:
        rep = order.validate_semigroup(s)
    status = {True: "ok", False: "FAIL", None: "skip"}
    if a.format == "text":
        out.write("\n".join(rep.lines()) + "\n")
        return 0
    em = Emitter(a.format, ["check", "status", "witness", "note"], str, out)
    for c in rep.checks:
        em.row({"check": c.name, "status": status[c.passed],
                "witness": "" if c.witness is None else str(c.witness), "note": c.note})
    em.row({"check": rep.title, "status": "PASS" if rep.ok else "FAIL",
            "witness": "", "note": f"axioms={rep.n_passed}/{rep.checked}"})
    return 0


def cmd_complete(a, out) -> int:
    s = order.parse_cayley(_read(a.file))
    if s.mul_table is not None and not a.order_only:
        c = order.complete_semiring(s)
    else:
        lat = order.macneille_completion(order.standard_order(s))
        m = len(lat)
        add = [[lat.join((i, j)) for j in range(m)] for i in range(m)]
        c = order.CayleyStructure(m, add, None, lat.bottom, None, tuple(lat.label(k) for k in range(m)))
    if a.format == "text":
        out.write(order.format_cayley(c))
        return 0
    p = order.standard_order(c)
    em = Emitter(a.format, ["index", "label", "covers"], str, out)
    for i in range(c.n):
        below = [j for j in range(c.n) if j != i and p.leq[j, i]]
        covers = [j for j in below if not any(k != j and p.leq[j, k] for k in below)]
        em.row({"index": i, "label": c.labels[i], "covers": ";".join(c.labels[j] for j in covers)})
    return 0


def cmd_solve_path(a, out) -> int:
    d = get_semiring(a.semiring)
    g = linalg.parse_graph(_read(a.file), a.nodes)
    res = linalg.shortest_paths(g, a.source, d)
    targets = [a.target] if a.target is not None else range(g.n)
    em = Emitter(a.format, ["source", "target", "dist", "path"],
                 lambda r: f"{r['source']}→{r['target']} dist={_cell(r['dist'])} path={r['path']}", out)
    for t in targets:
        if not 0 <= t < g.n:
            raise linalg.GraphError(f"target {t} is not a node")
        p = res.path_to(t)
        em.row({"source": a.source, "target": t, "dist": float(res.distances[t]),
                "path": "" if p is None else ",".join(map(str, p))})
    return 0


def _emit_matrix(A: linalg.TropMatrix, fmt: str, out, meta: dict | None = None) -> None:
    if fmt == "text":
        if meta:
            out.write("# " + " ".join(f"{k}={v}" for k, v in meta.items()) + "\n")
        out.write(linalg.format_matrix(A))
        return
    em = Emitter(fmt, ["row", "col", "value"], str, out, meta)
    for i in range(A.rows):
        for j in range(A.cols):
            em.row({"row": i, "col": j, "value": float(A.values[i, j])})


def cmd_star(a, out) -> int:
    A = linalg.parse_matrix(_read(a.file))
    _emit_matrix(linalg.kleene_star(A), a.format, out)
    return 0


def cmd_bellman(a, out) -> int:
    H = linalg.parse_matrix(_read(a.H))
    F = linalg.parse_matrix(_read(a.F))
    sol = linalg.solve_bellman(H, F, a.method)
    _emit_matrix(sol.X, a.format, out,
                 {"method": sol.method, "iterations": sol.iterations, "converged": str(sol.converged).lower()})
    return 0


def cmd_duality_check(a, out) -> int:
    if a.dim < 1 or a.trials < 0:
        raise duality.DomainError("dim must be >= 1 and trials >= 0")
    em = Emitter(a.format, ["suite", "status", "trials", "failures"],
                 lambda r: f"{r['status']} {r['suite']} trials={r['trials']} failures={r['failures']}", out,
                 {"seed": a.seed, "dim": a.dim})
    results = duality.run_duality_suite(a.dim, a.trials, a.seed)
    for r in results:
        em.row({"suite": r.name, "status": "PASS" if r.ok else "FAIL", "trials": r.trials, "failures": r.failures})
    return 0 if all(r.ok for r in results) else 1


def cmd_project(a, out) -> int:
    x = linalg.parse_vector(_read(a.vector), RMAXHAT)
    G = linalg.parse_matrix(_read(a.gens))
    if G.d.token not in ("rmax", "rmaxhat"):
        raise duality.UnsupportedCarrierError("generator files must use rmax or rmaxhat")
    excluded: tuple = ()
    if a.mode == "upper":
        W = duality.GeneratorSet(tuple(G.values), "inf_closure", allow_zero=True)
        p, excluded = duality.project_upper(x, W, with_excluded=True)
    else:
        W = duality.GeneratorSet(tuple(G.values), "sup_span", allow_zero=True)
        p = duality.project_lower(x, W)
    if a.format == "text":
        out.write(" ".join(format_value(v) for v in p.values) + "\n")
        if excluded:
            out.write(f"# excluded generators: {','.join(map(str, excluded))}\n")
        return 0
    em = Emitter(a.format, ["index", "value"], str, out,
                 {"excluded": ",".join(map(str, excluded))} if excluded else None)
    for i, v in enumerate(p.values):
        em.row({"index": i, "value": float(v)})
    return 0


def _parse_range(text: str) -> np.ndarray:
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected a:b:step")
    try:
        lo, hi, step = (float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad range {text!r}") from None
    if not step > 0 or hi < lo:
        raise argparse.ArgumentTypeError("need a <= b and step > 0")
    return calculus.make_grid(lo, hi, step)


def cmd_legendre(a, out) -> int:
    phi = calculus.parse_sampled(_read(a.file))
    res = calculus.legendre(phi, a.xi, fenchel=a.fenchel, fast=a.fast, full=True)
    x = phi.grid
    em = Emitter(a.format, ["xi", "value", "argmax_x"],
                 lambda r: f"xi={_cell(r['xi'])} value={_cell(r['value'])} argmax_x={_cell(r['argmax_x'])}", out,
                 {"mode": res.mode, "fenchel": str(a.fenchel).lower()})
    for xi, v, k in zip(res.transform.grid, res.transform.values, res.argmax):
        em.row({"xi": float(xi), "value": float(v), "argmax_x": float(x[k]) if k >= 0 else float("nan")})
    return 0


def cmd_hj_demo(a, out) -> int:
    if a.init.startswith("file:"):
        S0 = calculus.parse_sampled(_read(a.init[5:]))
        if S0.orientation != "min_plus":
            S0 = calculus.SampledFunction(S0.origin, S0.step, S0.values, "min_plus")
    elif a.init in calculus.CORPUS:
        S0 = calculus.SampledFunction.from_callable(calculus.CORPUS[a.init], a.lo, a.hi, a.step, "min_plus")
    else:
        raise calculus.DomainError(f"unknown initial datum {a.init!r}")
    try:
        hs = [float(h) for h in a.h.split(",") if h.strip()]
    except ValueError:
        raise calculus.DomainError(f"bad h list {a.h!r}") from None
    rows = calculus.hj_gap_table(S0, a.t, hs, (a.window_lo, a.window_hi))
    em = Emitter(a.format, ["h", "gap", "argmax_x"],
                 lambda r: f"h={_cell(r['h'])} gap={_cell(r['gap'])} argmax_x={_cell(r['argmax_x'])}", out,
                 {"init": a.init, "t": a.t})
    for r in rows:
        em.row({"h": r.h, "gap": r.gap, "argmax_x": r.argmax_x})
    return 0


def cmd_integrate(a, out) -> int:
    phi = calculus.parse_sampled(_read(a.file))
    recs = [("integral", calculus.idem_integral(phi))]
    if a.wrt:
        psi = calculus.parse_sampled(_read(a.wrt))
        recs.append(("integral_wrt", calculus.idem_integral_wrt(phi, psi)))
    if a.subset is not None:
        idx = [int(i) for i in a.subset.split(",") if i.strip()]
        recs.append(("measure", calculus.idem_measure(phi, idx)))
    em = Emitter(a.format, ["quantity", "value"], lambda r: f"{r['quantity']}={_cell(r['value'])}", out)
    for q, v in recs:
        em.row({"quantity": q, "value": float(v)})
    return 0


# -- parser ----------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tropicalis", description="Idempotent semiring algebra toolkit.")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")
    tokens = sorted(DESCRIPTORS)

    def add(name, fn, help_, columns):
        sp = sub.add_parser(name, help=help_, description=f"{help_} CSV/JSONL columns: {columns}.")
        sp.add_argument("--format", choices=FORMATS, default="text")
        sp.set_defaults(fn=fn)
        return sp

    sp = add("validate", cmd_validate, "Check the axioms of a finite structure given by tables.",
             "check,status,witness,note")
    sp.add_argument("file")
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--semiring", action="store_true")
    g.add_argument("--semifield", action="store_true")
    g.add_argument("--integrally-closed", action="store_true")

    sp = add("complete", cmd_complete, "Normal completion of a finite structure (product extended by sups).",
             "index,label,covers")
    sp.add_argument("file")
    sp.add_argument("--order-only", action="store_true", help="complete the order and sum only")

    sp = add("solve-path", cmd_solve_path, "Optimal paths from a source in an edge-list graph.",
             "source,target,dist,path")
    sp.add_argument("file")
    sp.add_argument("--semiring", choices=tokens, default="rmin")
    sp.add_argument("--source", type=int, required=True)
    sp.add_argument("--target", type=int)
    sp.add_argument("--nodes", type=int, help="node count (default: largest id + 1)")

    sp = add("star", cmd_star, "Kleene star of a square matrix.", "row,col,value")
    sp.add_argument("file")

    sp = add("bellman", cmd_bellman, "Least solution of X = H X + F.", "row,col,value")
    sp.add_argument("H")
    sp.add_argument("F")
    sp.add_argument("--method", choices=linalg.METHODS, default="closure")

    sp = add("duality-check", cmd_duality_check, "Randomized x*-functional duality suites.",
             "suite,status,trials,failures")
    sp.add_argument("--dim", type=int, default=3)
    sp.add_argument("--trials", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=0)

    sp = add("project", cmd_project, "Upper or lower projection onto a generated subspace.", "index,value")
    sp.add_argument("vector")
    sp.add_argument("--gens", required=True, help="matrix file whose rows are the generators")
    sp.add_argument("--mode", choices=("upper", "lower"), default="upper")

    sp = add("legendre", cmd_legendre, "Max-plus Legendre transform of a sampled function.",
             "xi,value,argmax_x")
    sp.add_argument("file")
    sp.add_argument("--xi", type=_parse_range, required=True, help="a:b:step")
    sp.add_argument("--fenchel", action="store_true", help="classical sign sup(xi x - phi)")
    sp.add_argument("--fast", action="store_true", help="linear-time hull scan")

    sp = add("hj-demo", cmd_hj_demo, "Cole-Hopf versus Hopf-Lax gap table.", "h,gap,argmax_x")
    sp.add_argument("--init", default="quad", help="quad, abs, well or file:<path>")
    sp.add_argument("--t", type=float, default=1.0)
    sp.add_argument("--h", default="0.2,0.1,0.05,0.025")
    sp.add_argument("--lo", type=float, default=-6.0)
    sp.add_argument("--hi", type=float, default=6.0)
    sp.add_argument("--step", type=float, default=0.01)
    sp.add_argument("--window-lo", type=float, default=-2.0)
    sp.add_argument("--window-hi", type=float, default=2.0)
    sp.add_argument("--out", dest="format", choices=FORMATS, help="alias of --format")

    sp = add("integrate", cmd_integrate, "Idempotent integral of a sampled function.", "quantity,value")
    sp.add_argument("file")
    sp.add_argument("--wrt", help="density file on the same grid")
    sp.add_argument("--subset", help="comma-separated sample indices for the measure")
    return p


def main(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    buf = io.StringIO()
    try:
        code = args.fn(args, buf)
    except (TropicalisError, ValueError, FileNotFoundError) as exc:
        rec = {"error": type(exc).__name__, "command": args.command, "message": str(exc)}
        for attr in ("witness", "cycle"):
            if getattr(exc, attr, None) is not None:
                rec[attr] = str(getattr(exc, attr))
        err.write(json.dumps(rec) + "\n")
        return 1
    out.write(buf.getvalue())
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

"""Command-line front end.

Graphs are named by a spec string ``scheme:payload``:

    name:k33        catalog graph (a bare catalog key works too)
    file:g.txt      edge-list file
    gp:10,3         generalized Petersen graph
    hypercube:3     P2^k
    p3grid:2        P3^k
    path:4, cycle:6

Exit codes: 0 success, 1 usage or input error, 2 numerical failure,
3 verification failure.
"""
from __future__ import annotations

import argparse
import ast
import json
import math
import operator
import os
import sys
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import analysis, catalog, dynamics, graph, spectral, theorem
from .catalog import CatalogError
from .graph import Graph, GraphError
from .spectral import CertificateError, NumericalError

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_VERIFY = 0, 1, 2, 3
SCHEMES = ("name", "file", "gp", "hypercube", "p3grid", "path", "cycle")


class UsageError(Exception):
    pass


# -- graph specs -------------------------------------------------------------

@dataclass(frozen=True)
class GraphSpec:
    scheme: str
    payload: str

    @classmethod
    def parse(cls, text: str) -> "GraphSpec":
        scheme, sep, payload = text.partition(":")
        if not sep:
            scheme, payload = "name", text
        if scheme not in SCHEMES:
            raise UsageError(f"unknown graph scheme {scheme!r} in {text!r}; use one of {', '.join(SCHEMES)}")
        if not payload:
            raise UsageError(f"empty payload in graph spec {text!r}")
        return cls(scheme, payload)

    def _ints(self, count: int) -> list[int]:
        try:
            values = [int(x) for x in self.payload.split(",")]
        except ValueError:
            raise UsageError(f"{self.scheme}: expected integers, got {self.payload!r}") from None
        if len(values) != count:
            raise UsageError(f"{self.scheme}: expected {count} integer(s), got {self.payload!r}")
        return values

    def resolve(self) -> Graph:
        try:
            if self.scheme == "name":
                return catalog.entry(self.payload).graph
            if self.scheme == "file":
                return graph.read_edge_list(self.payload)
            if self.scheme == "gp":
                n, k = self._ints(2)
                return catalog.generalized_petersen(n, k)
            (k,) = self._ints(1)
            if self.scheme == "hypercube":
                return graph.power_product(graph.path(2), k).renamed(f"Q{k}")
            if self.scheme == "p3grid":
                return graph.power_product(graph.path(3), k)
            if self.scheme == "path":
                return graph.path(k)
            return graph.cycle(k)
        except KeyError as exc:
            raise UsageError(exc.args[0]) from None
        except (GraphError, OSError) as exc:
            raise UsageError(f"{self.scheme}:{self.payload}: {exc}") from None


def resolve_graph(text: str) -> Graph:
    return GraphSpec.parse(text).resolve()


# -- small helpers -----------------------------------------------------------

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}


def parse_time(text: str) -> float:
    """A float, or an arithmetic expression in ``pi`` and ``sqrt`` such as ``pi/(2*sqrt(3))``."""
    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)
                and node.func.id == "sqrt" and len(node.args) == 1):
            return math.sqrt(ev(node.args[0]))
        raise ValueError
    try:
        value = ev(ast.parse(text.strip(), mode="eval"))
    except (SyntaxError, ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a time value: {text!r}") from None
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"time must be finite: {text!r}")
    return value


def _f6(x: float) -> str:
    text = f"{x:.6f}"
    return "0.000000" if text == "-0.000000" else text


def _g17(x: float) -> str:
    return f"{x:.17g}"


def pi_label(t: float, tol: float = 1e-9) -> str:
    """``t`` as a small rational multiple of pi (``pi/2``, ``2pi/5``) when it is one."""
    for q in range(1, 13):
        p = round(t * q / math.pi)
        if p > 0 and math.gcd(p, q) == 1 and abs(t - p * math.pi / q) < tol:
            num = "π" if p == 1 else f"{p}π"
            return num if q == 1 else f"{num}/{q}"
    return _f6(t)


def _jnum(x: Optional[float]) -> Optional[float]:
    """Round floats for JSON so reports are stable across platforms."""
    return None if x is None else float(f"{x:.12g}")


def _emit_json(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True))


def default_grid() -> int:
    raw = os.environ.get("PSTLAB_GRID")
    if raw is None:
        return dynamics.DEFAULT_GRID
    try:
        value = int(raw)
    except ValueError:
        raise UsageError(f"PSTLAB_GRID must be an integer, got {raw!r}") from None
    if value < 2:
        raise UsageError("PSTLAB_GRID must be at least 2")
    return value


def _check_pair(g: Graph, i: int, j: int) -> None:
    for v in (i, j):
        if not 1 <= v <= g.n:
            raise UsageError(f"vertex {v} out of range 1..{g.n}")


def _pairs_json(results) -> list[dict]:
    return [{"i": r.pair[0], "j": r.pair[1], "t_star": _jnum(r.t_star), "f_star": _jnum(r.f_star)}
            for r in results]


# -- commands ----------------------------------------------------------------

def cmd_spectrum(args) -> int:
    g = resolve_graph(args.graph)
    cert = spectral.integral_certificate(g)
    evals = spectral.eigendecompose(g).eigenvalues
    if args.json:
        out = {"graph": g.name, "n": g.n, "integral": cert is not None,
               "eigenvalues": [_jnum(x) for x in evals],
               "charpoly": list(spectral.char_poly(g))}
        if cert is not None:
            out["spectrum"] = [{"lambda": lam, "multiplicity": m} for lam, m in cert.roots]
        else:
            out["residual"] = spectral.integer_root_factorization(g)[1]
        _emit_json(out)
        return EXIT_OK
    if cert is not None:
        print(cert.spectrum_string())
        print(spectral.format_certificate(cert))
    else:
        _, residual = spectral.integer_root_factorization(g)
        print("eigenvalues " + " ".join(_f6(x) for x in evals))
        print(f"not integral; residual {spectral.format_poly(residual)}")
        print("charpoly " + " ".join(str(c) for c in spectral.char_poly(g)))
    return EXIT_OK


def cmd_integral(args) -> int:
    g = resolve_graph(args.graph)
    roots, residual = spectral.integer_root_factorization(g)
    integral = residual == [1]
    k = graph.is_regular(g)
    periodic = integral and k is not None and graph.is_connected(g)
    per = dynamics.period(g, spectral.integral_certificate(g)) if periodic else None
    if args.json:
        _emit_json({"graph": g.name, "integral": integral, "regular": k, "periodic": periodic,
                    "period": _jnum(per), "integer_roots": [[lam, m] for lam, m in roots],
                    "residual": residual})
        return EXIT_OK
    if integral:
        print("integral; spectrum " + " ".join(f"{lam}:{m}" for lam, m in roots))
        if periodic:
            print(f"periodic; period {_f6(per)}")
    else:
        print(f"not integral; residual {spectral.format_poly(residual)}")
    return EXIT_OK


def _window(g: Graph, tmax: Optional[float]) -> float:
    if tmax is not None:
        if tmax <= 0:
            raise UsageError("--tmax must be positive")
        return tmax
    return dynamics.default_window(g, spectral.integral_certificate(g))


def cmd_maxfid(args) -> int:
    g = resolve_graph(args.graph)
    grid = args.grid if args.grid is not None else default_grid()
    if grid < 2:
        raise UsageError("--grid must be at least 2")
    t_max = _window(g, args.tmax)
    if args.all_pairs:
        pairs = [(i, j) for i in range(1, g.n + 1) for j in range(i + 1, g.n + 1)]
        if not pairs:
            raise UsageError("--all-pairs needs at least two vertices")
    else:
        i, j = args.pair
        _check_pair(g, i, j)
        pairs = [(i, j)]
    results = dynamics.max_fidelity_pairs(g, pairs, t_max, grid)
    best = dynamics.best_of(results)
    if args.json:
        cert = spectral.integral_certificate(g)
        periodic = cert is not None and graph.is_regular(g) is not None
        _emit_json({"graph": g.name, "t_max": _jnum(t_max), "grid": grid,
                    "best": _pairs_json([best])[0], "pairs": _pairs_json(results),
                    "integral": cert is not None, "periodic": periodic,
                    "period": _jnum(dynamics.period(g, cert)) if periodic else None,
                    "verdict": "PST" if best.f_star >= 1 - theorem.PST_TOL and len(set(best.pair)) == 2
                    else "no-PST"})
        return EXIT_OK
    print(f"best pair ({best.pair[0]},{best.pair[1]}): f*={_f6(best.f_star)} at t*={_f6(best.t_star)}"
          f"  [window 0..{_f6(t_max)}, grid {grid}]")
    if args.all_pairs:
        print(f"{'i':>4} {'j':>4} {'f*':>10} {'t*':>10}")
        for r in results:
            print(f"{r.pair[0]:>4} {r.pair[1]:>4} {_f6(r.f_star):>10} {_f6(r.t_star):>10}")
    return EXIT_OK


def theorem_json(result: theorem.TheoremResult) -> dict:
    graphs = []
    for row in result.rows:
        rep = row.report
        graphs.append({
            "graph": row.key,
            "pairs": _pairs_json([rep.best]),
            "integral": rep.is_integral,
            "periodic": rep.is_periodic,
            "period": _jnum(rep.period),
            "verdict": rep.verdict,
            "golden_value": _jnum(row.golden.value),
            "problems": list(row.problems),
        })
    return {"graphs": graphs, "grid": result.grid, "pst_graphs": result.pst_graphs,
            "passed": result.passed}


def cmd_verify_theorem(args) -> int:
    grid = args.grid if args.grid is not None else default_grid()
    result = theorem.verify_theorem(grid)
    if args.json:
        _emit_json(theorem_json(result))
    else:
        print(f"{'graph':<15} {'n':>3} {'period':>9} {'pair':>8} {'f*':>9} {'t*':>9} {'golden':>12}  status")
        for row in result.rows:
            rep, best = row.report, row.report.best
            pair = f"({best.pair[0]},{best.pair[1]})"
            status = "ok" if row.ok else "FAIL: " + "; ".join(row.problems)
            print(f"{row.key:<15} {catalog.entry(row.key).graph.n:>3} "
                  f"{_f6(rep.period):>9} {pair:>8} {_f6(best.f_star):>9} {_f6(best.t_star):>9} "
                  f"{row.golden.label:>12}  {rep.verdict} {status}")
        cube = next(r for r in result.rows if r.key == "cube").report.best
        others = [r for r in result.rows if r.key != "cube"]
        print(f"cube: PST ({cube.pair[0]},{cube.pair[1]}) t={pi_label(cube.t_star)}; "
              f"{len(others)} others: {'no PST' if not any(r.report.has_pst for r in others) else 'PST FOUND'}")
    if not result.passed:
        bad = [r.key for r in result.rows if not r.ok]
        print(f"verification failed for: {', '.join(bad)}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def cmd_entry(args) -> int:
    g = resolve_graph(args.graph)
    _check_pair(g, args.i, args.j)
    if args.samples < 1:
        raise UsageError("--samples must be positive")
    if args.tmax <= 0:
        raise UsageError("--tmax must be positive")
    ts = np.linspace(0.0, args.tmax, args.samples)
    d = dynamics._decomposition(g)
    w = d.vectors[args.i - 1] * d.vectors[args.j - 1]
    values = w @ np.exp(-1j * np.outer(d.eigenvalues, ts))
    lines = ["t,re,im,abs"]
    lines += [f"{_g17(t)},{_g17(v.real)},{_g17(v.imag)},{_g17(abs(v))}" for t, v in zip(ts, values)]
    sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_persistency(args) -> int:
    g = resolve_graph(args.graph)
    _check_pair(g, args.i, args.j)
    if args.eps < 0:
        raise UsageError("--eps must be non-negative")
    if args.grid < 2:
        raise UsageError("--grid must be at least 2")
    r = analysis.persistency(g, args.i, args.j, args.eps, args.grid)
    if args.json:
        _emit_json({"graph": g.name, "i": r.pair[0], "j": r.pair[1], "epsilon": r.epsilon,
                    "level": _jnum(r.level), "interval": [_jnum(r.interval[0]), _jnum(r.interval[1])],
                    "length": _jnum(r.length), "grid": r.grid})
        return EXIT_OK
    print(f"pair ({r.pair[0]},{r.pair[1]}) eps={r.epsilon}: length {_f6(r.length)} "
          f"on [{_f6(r.interval[0])}, {_f6(r.interval[1])}) around level {_f6(r.level)}")
    return EXIT_OK


def cmd_hadamard(args) -> int:
    g = resolve_graph(args.graph)
    u = dynamics.propagator(g, args.t)
    scale = analysis.is_scaled_complex_hadamard(u, args.tol)
    if args.json:
        _emit_json({"graph": g.name, "t": _jnum(args.t), "hadamard": scale is not None,
                    "scale": _jnum(scale), "tol": args.tol})
        return EXIT_OK
    if scale is None:
        print("not a scaled complex Hadamard matrix")
    else:
        print(f"scaled complex Hadamard, scale {scale:.6g}")
    return EXIT_OK


def cmd_probtransfer(args) -> int:
    if args.steps < 1:
        raise UsageError("--steps must be positive")
    r = analysis.probability_transfer_search(analysis.w_k4_exact(), args.steps)
    if args.json:
        _emit_json({"steps": r.steps, "hit": list(r.hit) if r.hit else None,
                    "num_patterns": r.num_patterns,
                    "patterns": [[[int(x) for x in row] for row in p] for p in r.patterns]})
        return EXIT_OK
    if r.hit:
        step, i, j = r.hit
        print(f"perfect probability transfer {i} -> {j} at step {step}; {r.num_patterns} zero-patterns")
    else:
        print(f"no perfect probability transfer; {r.num_patterns} zero-patterns")
    for p in r.patterns:
        print()
        print(analysis.format_pattern(p))
    return EXIT_OK


# -- parser ------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="pstlab", description="Perfect state transfer on graphs.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("spectrum", help="exact spectrum / characteristic polynomial")
    s.add_argument("graph")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_spectrum)

    s = sub.add_parser("integral", help="integrality and periodicity decision")
    s.add_argument("graph")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_integral)

    s = sub.add_parser("maxfid", help="maximum transfer fidelity")
    s.add_argument("graph")
    mode = s.add_mutually_exclusive_group(required=True)
    mode.add_argument("--pair", nargs=2, type=int, metavar=("I", "J"))
    mode.add_argument("--all-pairs", action="store_true")
    s.add_argument("--tmax", type=parse_time, help="search window (default: one period, or 6*pi)")
    s.add_argument("--grid", type=int, help="grid points (default 20000 or $PSTLAB_GRID)")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_maxfid)

    s = sub.add_parser("verify-theorem", help="check the cubic-graph PST theorem")
    s.add_argument("--grid", type=int)
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_verify_theorem)

    s = sub.add_parser("entry", help="CSV time series of one propagator entry")
    s.add_argument("graph")
    s.add_argument("i", type=int)
    s.add_argument("j", type=int)
    s.add_argument("--samples", type=int, default=1001)
    s.add_argument("--tmax", type=parse_time, default=2 * math.pi)
    s.set_defaults(func=cmd_entry)

    s = sub.add_parser("persistency", help="epsilon-persistency of an entry on [0, 2pi]")
    s.add_argument("graph")
    s.add_argument("i", type=int)
    s.add_argument("j", type=int)
    s.add_argument("--eps", type=float, required=True)
    s.add_argument("--grid", type=int, default=20001)
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_persistency)

    s = sub.add_parser("hadamard", help="is U(t) a scaled complex Hadamard matrix")
    s.add_argument("graph")
    s.add_argument("--t", type=parse_time, required=True)
    s.add_argument("--tol", type=float, default=1e-4,
                   help="modulus/orthogonality tolerance (default 1e-4, loose enough for rounded t)")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_hadamard)

    s = sub.add_parser("probtransfer", help="zero patterns of powers of W_K4")
    s.add_argument("--steps", type=int, default=1000)
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_probtransfer)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"pstlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalError, CertificateError) as exc:
        print(f"pstlab: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except CatalogError as exc:
        print(f"pstlab: verification failure: {exc}", file=sys.stderr)
        return EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())

"""Command-line interface: ``clusterbases <command> SEEDFILE [options]``."""

from __future__ import annotations

import argparse
import os
import sys
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from . import bases, laurent, scatter, seeds
from .errors import ClusterError, ParseError, UsageError
from .laurent import format_poly, parse_poly
from .textio import (
    error_record,
    format_matrix,
    format_path,
    format_set,
    format_vector,
    load_seed,
    parse_path,
    parse_script,
    parse_vector,
)

EXIT_CODES = {"usage": 2, "parse": 2, "configuration": 3, "invariant": 4,
              "inexact-division": 4, "family-contract": 5, "deformation": 5,
              "unsupported-region": 6}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _coreach(s: seeds.Seed, ns) -> seeds.Coreach:
    return seeds.coreach_of(s, ns.max_depth)


def _family(s: seeds.Seed, name: str) -> bases.PointedFamily:
    if name == "cluster-monomials":
        return bases.cluster_monomial_family(s)
    if name == "kronecker-generic":
        return bases.kronecker_generic_family(s)
    raise UsageError(f"unknown family {name!r} (cluster-monomials | kronecker-generic)")


def _need_g(ns, s) -> tuple:
    if ns.g is None:
        raise UsageError("--g is required")
    g = parse_vector(ns.g)
    if len(g) != s.n:
        raise UsageError(f"--g needs {s.n} coordinates")
    return g


def _track(s, ns) -> seeds.TrackedPath:
    return seeds.track(s, parse_path(ns.path or "", s))


# ---------------------------------------------------------------------------
# commands

def cmd_mutate(s, ns) -> str:
    p = parse_path(ns.path or "", s)
    return format_matrix(seeds.mutate_sequence(s, p).b) + "\n"


def cmd_expand(s, ns) -> str:
    p = _track(s, ns)
    out = []
    for i, (k, z) in enumerate(zip(p.steps, laurent.cluster_history(p)), 1):
        out.append(f"step {i} mutate {k + 1}: {format_poly(z)}")
    for i, z in enumerate(laurent.cluster_variables_along(p), 1):
        out.append(f"cluster {i}: {format_poly(z)}")
    return "\n".join(out) + "\n"


def cmd_gvec(s, ns) -> str:
    p = _track(s, ns)
    return "".join(f"g{i}: {format_vector(v)}\n" for i, v in enumerate(seeds.g_vectors(p), 1))


def cmd_cvec(s, ns) -> str:
    p = _track(s, ns)
    return "".join(f"c{k + 1}: {format_vector(v)}\n"
                   for k, v in zip(s.unfrozen, seeds.c_vectors(p)))


def cmd_g2r(s, ns) -> str:
    p = seeds.find_green_to_red(s, ns.max_depth)
    if p is None:
        return f"sequence: none within depth {ns.max_depth}\n"
    sigma = seeds.green_to_red_check(p)
    return f"sequence: {format_path(p.steps)}; sigma: {sigma}\n"


def cmd_coreach(s, ns) -> str:
    p = seeds.find_coreachable(s, ns.max_depth)
    if p is None:
        return f"t[-1]: none within depth {ns.max_depth}\n"
    sigma = seeds.green_to_red_check(p)
    rows = ";".join(",".join(map(str, r)) for r in p.base.b.entries)
    return f"t[-1]: B={rows}; sequence: {format_path(p.steps)}; sigma: {sigma}\n"


def cmd_suppdim(s, ns) -> str:
    g = _need_g(ns, s)
    return format_vector(bases.support_dimension_of_degree(g, _coreach(s, ns))) + "\n"


def cmd_interval(s, ns) -> str:
    from .lattice import interval
    g = _need_g(ns, s)
    if ns.eta is not None:
        return format_set(interval(parse_vector(ns.eta), g, s.Bt)) + "\n"
    return format_set(bases.bidegree_interval(g, _coreach(s, ns))) + "\n"


def cmd_defactor(s, ns) -> str:
    g = _need_g(ns, s)
    c = _coreach(s, ns)
    f = bases.pair_deformation_factor(g, c) if ns.pair else bases.deformation_factor(g, c)
    return format_set(f) + "\n"


def cmd_decompose(s, ns) -> str:
    if ns.poly is None:
        raise UsageError("--poly is required")
    z = parse_poly(ns.poly, s.n)
    res = bases.dominance_decompose(z, _family(s, ns.family), ns.max_iter)
    out = [f"{format_vector(g)}: {c}" for g, c in sorted(res.coefficients.items())]
    out.append(f"residual: {format_poly(res.residual)}")
    if res.gap is not None:
        out.append(f"gap: {format_vector(res.gap)}")
    return "\n".join(out) + "\n"


def cmd_verify_basis(s, ns) -> str:
    lo, hi = parse_vector(ns.window)
    rep = bases.verify_basis_candidate(_family(s, ns.family), (lo, hi), _coreach(s, ns))
    lines = rep.lines()
    lines.append(f"result: {'pass' if rep.passed else 'fail'}")
    if rep.failures:
        lines.append("failed: " + " ".join(format_vector(g) for g in rep.failures))
    return "\n".join(lines) + "\n"


def cmd_scatter(s, ns) -> str:
    return scatter.dump(scatter.cluster_diagram(s, ns.order))


def cmd_theta(s, ns) -> str:
    g = _need_g(ns, s)
    d = scatter.cluster_diagram(s, ns.order)
    at = parse_vector(ns.at) if ns.at else (1, 1)
    th = scatter.theta(d, g, at)
    flag = "exact" if th.exact else "truncated"
    return f"{format_poly(th.as_poly())}\n# order={ns.order} {flag}\n"


def cmd_opposite_check(s, ns) -> str:
    d = scatter.cluster_diagram(s, ns.order)
    d_op = scatter.cluster_diagram(seeds.opposite_seed(s), ns.order)
    lines = [f"walls-match: {'yes' if scatter.same_walls(scatter.opposite_diagram(d), d_op) else 'no'}"]
    ok = True
    for name, (a, b, how) in {"ccw": ((1, 1), (-1, -1), "ccw"),
                              "cw": ((1, 1), (-1, -1), "cw")}.items():
        op = scatter.path_product(d, a, b, how)
        for m in ((1, 0), (-1, 0), (0, 1), (0, -1), (1, 1)):
            r = scatter.opposite_identity(d, d_op, op, m)
            ok = ok and r
            lines.append(f"path={name} m={format_vector(m)} identity={'yes' if r else 'no'}")
    lines.append(f"result: {'pass' if ok else 'fail'}")
    return "\n".join(lines) + "\n"


COMMANDS: Dict[str, Callable] = {
    "mutate": cmd_mutate,
    "expand": cmd_expand,
    "gvec": cmd_gvec,
    "cvec": cmd_cvec,
    "g2r": cmd_g2r,
    "coreach": cmd_coreach,
    "suppdim": cmd_suppdim,
    "interval": cmd_interval,
    "defactor": cmd_defactor,
    "decompose": cmd_decompose,
    "verify-basis": cmd_verify_basis,
    "scatter": cmd_scatter,
    "theta": cmd_theta,
    "opposite-check": cmd_opposite_check,
}


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="clusterbases", description="Exact cluster-algebra computations.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("seed", help="seed file (YAML, format seed/1)")
        p.add_argument("--path", default="", help="comma-separated 1-based mutation sequence")
        p.add_argument("--g", help="degree vector, comma-separated")
        p.add_argument("--eta", help="lower end of an interval (interval command)")
        p.add_argument("--order", type=int, default=6, help="truncation order")
        p.add_argument("--max-depth", type=int, default=8, dest="max_depth")
        p.add_argument("--max-iter", type=int, default=1000, dest="max_iter")
        p.add_argument("--window", default="-3,3", help="box bounds a,b")
        p.add_argument("--family", default="cluster-monomials")
        p.add_argument("--poly", help="Laurent polynomial in canonical text form")
        p.add_argument("--at", help="target point for theta (default 1,1)")
        p.add_argument("--pair", action="store_true",
                       help="defactor: compare only at t and t[-1]")
        p.add_argument("--out", help="write output to this file")
    run = sub.add_parser("run")
    run.add_argument("script", help="script file (YAML, format script/1)")
    run.add_argument("--out")
    return ap


def _script_argv(cmd: dict) -> List[str]:
    argv = [str(cmd["run"]), "-"]
    for k, v in cmd.items():
        if k in ("run", "seed"):
            continue
        if v is True:
            argv.append(f"--{k}")
        elif isinstance(v, list):
            argv += [f"--{k}", ",".join(str(x) for x in v)]
        else:
            argv += [f"--{k}", str(v)]
    return argv


def _run_script(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            script = parse_script(fh.read(), os.path.dirname(os.path.abspath(path)))
    except OSError as exc:
        raise ParseError(f"cannot read script {path}: {exc.strerror}") from None
    parser = build_parser()
    out = []
    for i, cmd in enumerate(script["commands"], 1):
        ns = parser.parse_args(_glue_negative_values(_script_argv(cmd)))
        if ns.command == "run":
            raise UsageError("scripts cannot run scripts")
        out.append(f"## {i} {ns.command} {cmd['seed']}\n")
        out.append(COMMANDS[ns.command](script["seeds"][str(cmd["seed"])], ns))
    return "".join(out)


_VALUE_FLAGS = {"--path", "--g", "--eta", "--window", "--at", "--poly"}


def _glue_negative_values(argv: Sequence[str]) -> List[str]:
    """Turn ``--g -1,0`` into ``--g=-1,0`` so argparse does not read it as an option."""
    out: List[str] = []
    it = iter(argv)
    for a in it:
        if a in _VALUE_FLAGS:
            v = next(it, None)
            out.append(a if v is None else f"{a}={v}")
        else:
            out.append(a)
    return out


def run_command(argv: Sequence[str]) -> Tuple[int, str, str]:
    """Run one invocation; return (exit status, stdout text, stderr text)."""
    try:
        ns = build_parser().parse_args(_glue_negative_values(argv))
        if ns.command == "run":
            text = _run_script(ns.script)
        else:
            text = COMMANDS[ns.command](load_seed(ns.seed), ns)
        if ns.out:
            with open(ns.out, "w", encoding="utf-8") as fh:
                fh.write(text)
            return 0, "", ""
        return 0, text, ""
    except ClusterError as exc:
        return EXIT_CODES.get(exc.kind, 1), "", error_record(exc) + "\n"
    except OSError as exc:
        return 1, "", error_record(exc) + "\n"


def main(argv: Optional[Sequence[str]] = None) -> int:
    status, out, err = run_command(sys.argv[1:] if argv is None else argv)
    sys.stdout.write(out)
    sys.stderr.write(err)
    return status


if __name__ == "__main__":
    sys.exit(main())

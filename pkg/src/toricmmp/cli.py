"""Command-line interface.

Exit codes: 1 usage, 2 parse, 3 invalid fan, 4 precondition, 5 certificate.
"""

from __future__ import annotations

import argparse
import sys

from . import report
from .contraction import DIVISORIAL, FIBER, contract_ray, flip, verify_divisorial, verify_flip
from .curves import mori_cone
from .divisors import canonical_divisor, q_cartier_data
from .errors import ParseError, PreconditionError, ToricError
from .fanfile import emit_fan, parse_boundary, read_document
from .linalg import fmt_vec
from .mmp import RayPolicy, log_pushforward_boundary, run_mmp
from .singularities import is_klt, is_terminal


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _vector(text: str):
    try:
        return tuple(int(t) for t in text.strip("()").split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer vector like 2,3 or (0,-1), got {text!r}")


def _indices(text: str):
    try:
        return tuple(int(t) for t in text.split(",") if t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated indices, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="toricmmp", description="Exact toric Mori theory: fans, curves, contractions, flips, MMP.")
    p.add_argument("--format", choices=("table", "json"), default="table")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def cmd(name, help):
        s = sub.add_parser(name, help=help)
        s.add_argument("fan", help="fan document")
        return s

    cmd("inspect", "validity, completeness and per-cone properties")
    cmd("picard", "basis and presentation of Pic(X)_Q")
    cmd("curves", "classes of all invariant wall curves")
    ne = cmd("ne", "extremal rays of NE(X) with K-signs")
    ne.add_argument("--boundary", help="boundary file")
    for name, help in (("contract", "contract one extremal ray"), ("flip", "flip a small (K+B)-negative ray")):
        s = cmd(name, help)
        s.add_argument("--ray", type=_vector, required=True, help="extremal ray, e.g. 2,3")
        s.add_argument("--boundary", help="boundary file")
    check = sub.add_parser("check", help="singularity checks")
    check.add_argument("what", choices=("terminal", "klt"))
    check.add_argument("fan")
    check.add_argument("--boundary", help="boundary file")
    mmp = sub.add_parser("mmp", help="run the MMP")
    mmp_sub = mmp.add_subparsers(dest="mmp_command", required=True, parser_class=_Parser)
    run = mmp_sub.add_parser("run", help="run until a minimal model or Mori fiber space")
    run.add_argument("fan")
    g = run.add_mutually_exclusive_group()
    g.add_argument("--policy", choices=("first",), default="first")
    g.add_argument("--rays", type=_indices, help="recorded choices i,j,... (then first)")
    g.add_argument("--interactive", action="store_true")
    run.add_argument("--boundary", help="boundary file")
    run.add_argument("--max-steps", type=int, default=20)
    return p


def _load(args):
    try:
        fan, boundary = read_document(args.fan)
    except FileNotFoundError:
        raise ToricError(f"no such fan document: {args.fan}")
    path = getattr(args, "boundary", None)
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                boundary = parse_boundary(fh.read(), fan)
        except OSError as exc:
            raise ParseError(f"cannot read boundary file: {exc}")
    return fan, boundary


def _interactive(out, inp):
    def choose(step, offered):
        out.write(f"step {step + 1}: (K+B)-negative rays\n")
        for i, r in enumerate(offered):
            out.write(f"  [{i}] {fmt_vec(r)}\n")
        out.write("choose index: ")
        out.flush()
        line = inp.readline()
        try:
            return int(line.strip())
        except ValueError:
            raise PreconditionError(f"not an index: {line.strip()!r}")

    return choose


def _contract(fan, boundary, ray, do_flip: bool) -> dict:
    outcome = contract_ray(fan, ray, boundary=boundary)
    out = {"command": "flip" if do_flip else "contract", **report.outcome_dict(outcome)}
    if outcome.kind == FIBER:
        if do_flip:
            raise PreconditionError("fiber-type contraction has nothing to flip")
        out["target_rank"] = outcome.quotient_rank
        return out
    Y = outcome.target
    K = canonical_divisor(Y)
    if boundary is not None:
        BY = log_pushforward_boundary(boundary, outcome)
        K = tuple(a + b for a, b in zip(K, BY))
    gor = q_cartier_data(Y, K) is not None
    out["target_q_gorenstein"] = gor
    if not do_flip:
        if outcome.kind == DIVISORIAL and gor:
            out["certificate"] = report.divisorial_dict(fan, verify_divisorial(fan, outcome, boundary))
        out["target_fan"] = emit_fan(Y)
        return out
    if gor:
        raise PreconditionError("K of the target is Q-Cartier; no flip is needed")
    result = flip(fan, outcome, boundary)
    region = [[Y.rays[j] for j in c] for c in result.region]
    cert = verify_flip(fan, result.fan, region, boundary=boundary, flipped_boundary=result.boundary, target=Y)
    out["certificate"] = report.flip_dict(result, cert)
    out["flipped_fan"] = emit_fan(result.fan, result.boundary)
    return out


def dispatch(args, stdin=None, stdout=None) -> dict:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    if args.command == "mmp":
        fan, boundary = _load(args)
        if args.interactive:
            policy = RayPolicy("interactive", callback=_interactive(stdout, stdin))
        elif args.rays is not None:
            policy = RayPolicy("explicit", args.rays)
        else:
            policy = RayPolicy()
        return report.mmp_report(run_mmp(fan, boundary, policy, args.max_steps))
    fan, boundary = _load(args)
    if args.command == "inspect":
        return report.inspect_report(fan)
    if args.command == "picard":
        return report.picard_report(fan)
    if args.command == "curves":
        return report.curves_report(fan)
    if args.command == "ne":
        return report.ne_report(fan, boundary, mori_cone(fan))
    if args.command in ("contract", "flip"):
        return _contract(fan, boundary, args.ray, args.command == "flip")
    if args.what == "terminal":
        return report.terminal_report(fan, is_terminal(fan))
    return report.klt_report(fan, boundary, is_klt(fan, boundary))


def main(argv=None, stdin=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        rep = dispatch(args, stdin, stdout)
    except ToricError as exc:
        sys.stderr.write(f"toricmmp: {type(exc).__name__}: {exc}\n")
        return exc.exit_code
    stdout.write(report.render(rep, args.format))
    if args.command == "mmp" and rep["status"] == "aborted":
        return 5 if "max_steps" not in rep.get("reason", "") else 4
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""``gandy-fix``: validate, iterate, decide, cross-check and benchmark instances.

Machine output is one ``key=value`` record per line.  The closing summary
record carries a ``ts=`` field unless ``--no-ts`` is given; everything else
is deterministic.

Exit status: 0 ok, 1 parse error, 2 validation error, 3 runtime budget
exceeded, 4 property violation.
"""
from __future__ import annotations

import argparse
import sys
from datetime import datetime, timezone
from typing import Callable, Sequence, TextIO

from .decide import bench_exponent, chain_generator, check_cost_bound, decide_pred
from .errors import (
    CostBoundViolation, DisjointnessViolation, InsufficientSizes, ParseError, PoolTooLarge,
    ValidationError,
)
from .fixpoint import (
    DEFAULT_BUDGET, CandidatePool, Order, _base_atoms, compare_states, iterate, oracle_extension,
)
from .instance import Instance, load

EXIT_OK, EXIT_PARSE, EXIT_VALIDATION, EXIT_BUDGET, EXIT_PROPERTY = 0, 1, 2, 3, 4


def _fmt(value) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return f"{value:.4f}"
    return str(value)


class Reporter:
    def __init__(self, out: TextIO, stamp: bool):
        self.out = out
        self.stamp = stamp

    def record(self, **fields) -> None:
        self.out.write(" ".join(f"{k}={_fmt(v)}" for k, v in fields.items()) + "\n")

    def summary(self, **fields) -> None:
        if self.stamp:
            fields["ts"] = datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
        self.record(**fields)

    def line(self, text: str) -> None:
        self.out.write(text + "\n")


def cmd_validate(inst: Instance, args, rep: Reporter) -> int:
    fs = inst.families
    rep.summary(status="valid", families=len(fs.families), rules=sum(1 for _ in fs.rules()),
                diagnostics=0)
    return EXIT_OK


def cmd_fixpoint(inst: Instance, args, rep: Reporter) -> int:
    pool = CandidatePool(inst.model, args.max_len, args.budget)
    trace = (lambda adm: rep.line("admit " + adm.record())) if args.trace else None
    state, report = iterate(inst.families, inst.model, pool, args.max_iters, trace)
    for prev, cur in zip(report.history, report.history[1:]):
        sizes = " ".join(f"{p}={n}" for p, n in cur.sizes().items())
        rep.line(f"stage={cur.stage} {sizes}")
        if compare_states(prev, cur) is not Order.LESS_OR_EQUAL:
            rep.summary(status="violation", property="monotonicity", stage=cur.stage)
            return EXIT_PROPERTY
    rep.summary(status="fixed" if report.reached else "unstable", max_len=args.max_len,
                pool=len(pool), steps=report.steps,
                fixed_stage=report.fixed_stage if report.reached else "none")
    return EXIT_OK if report.reached else EXIT_BUDGET


def cmd_decide(inst: Instance, args, rep: Reporter) -> int:
    fs = inst.families
    verdict = decide_pred(fs, inst.model, args.pred, args.elem, trace=args.trace)
    cost = check_cost_bound(verdict, fs.family(args.pred), args.elem)
    if args.trace and verdict.trace is not None:
        for text in verdict.trace.lines():
            rep.line("trace " + text.replace(" = ", "=").replace(" by ", " rule="))
    if args.meter:
        rep.line("meter " + " ".join(f"{k}={v}" for k, v in verdict.meter.breakdown().items()))
    rep.summary(pred=args.pred, elem=args.elem, value=verdict.value, units=verdict.units,
                n=cost.n, len=cost.length, tight_ok=cost.tight_ok, bound_ok=cost.relaxed_ok)
    return EXIT_OK if cost.relaxed_ok else EXIT_PROPERTY


def cmd_oracle(inst: Instance, args, rep: Reporter) -> int:
    fs, model = inst.families, inst.model
    pool = CandidatePool(model, args.max_len, args.budget)
    state, report = iterate(fs, model, pool, args.max_iters)
    if not report.reached:
        rep.summary(status="unstable", steps=report.steps)
        return EXIT_BUDGET
    truth = oracle_extension(fs, model, args.max_len, args.budget)
    mismatches = 0
    for p in fs.enrichable:
        same = state.extensions[p].keys() == truth.extensions[p].keys()
        mismatches += 0 if same else 1
        rep.record(check="iterate", pred=p, size=len(state.extensions[p]),
                   oracle=len(truth.extensions[p]), agree=same)
    words = [""] + [w for group in _base_atoms(model, args.max_len) for w in group] + pool.words()
    for p in fs.enrichable:
        members = truth.extensions[p]
        base = model.base_extension(p)
        bad = 0
        for w in words:
            expected = w in members or w in base
            if decide_pred(fs, model, p, w).value != expected:
                bad += 1
        mismatches += bad
        rep.record(check="decide", pred=p, words=len(words), disagreements=bad)
    verdict = "AGREE" if mismatches == 0 else "DISAGREE"
    rep.summary(verdict=verdict, max_len=args.max_len, fixed_stage=report.fixed_stage)
    return EXIT_OK if mismatches == 0 else EXIT_PROPERTY


def cmd_bench(inst: Instance, args, rep: Reporter) -> int:
    setting = inst.bench.get(args.pred)
    if setting is None:
        rep.summary(status="error", reason="no-bench-generator", pred=args.pred)
        return EXIT_VALIDATION
    fam = inst.families.family(args.pred)
    sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    result = bench_exponent(inst.families, inst.model, args.pred, sizes,
                            chain_generator(setting.seed, setting.wrap))
    for size, length, units, cost in result.rows:
        rep.record(size=size, len=length, n=cost.n, units=units, tight_ok=cost.tight_ok,
                   bound_ok=cost.relaxed_ok)
    limit = fam.bound.p + 1.3
    ok = result.slope <= limit and all(c.relaxed_ok for *_, c in result.rows)
    rep.summary(pred=args.pred, slope=result.slope, limit=limit, ok=ok)
    return EXIT_OK if ok else EXIT_PROPERTY


COMMANDS: dict[str, Callable[[Instance, argparse.Namespace, Reporter], int]] = {
    "validate": cmd_validate, "fixpoint": cmd_fixpoint, "decide": cmd_decide,
    "oracle": cmd_oracle, "bench": cmd_bench,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("instance", help="path to an instance file")
    common.add_argument("--no-ts", action="store_true", help="omit the timestamp field")

    parser = argparse.ArgumentParser(prog="gandy-fix", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("validate", parents=[common], help="load and validate an instance")

    fp = sub.add_parser("fixpoint", parents=[common], help="iterate to a pool fixed point")
    fp.add_argument("--max-len", type=int, required=True)
    fp.add_argument("--max-iters", type=int, default=64)
    fp.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    fp.add_argument("--trace", action="store_true", help="one record per admitted element")

    dp = sub.add_parser("decide", parents=[common], help="decide P(w) for one word")
    dp.add_argument("--pred", required=True)
    dp.add_argument("--elem", required=True)
    dp.add_argument("--meter", action="store_true", help="print the cost breakdown")
    dp.add_argument("--trace", action="store_true", help="print the derivation")

    op = sub.add_parser("oracle", parents=[common], help="cross-check against brute force")
    op.add_argument("--max-len", type=int, required=True)
    op.add_argument("--max-iters", type=int, default=64)
    op.add_argument("--budget", type=int, default=DEFAULT_BUDGET)

    bp = sub.add_parser("bench", parents=[common], help="fit the cost exponent")
    bp.add_argument("--pred", required=True)
    bp.add_argument("--sizes", required=True, help="comma-separated target lengths")
    return parser


def main(argv: Sequence[str] | None = None, out: TextIO | None = None,
         err: TextIO | None = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        inst = load(args.instance)
    except OSError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_PARSE
    except ParseError as exc:
        err.write(f"{args.instance}:{exc}\n")
        return EXIT_PARSE
    except ValidationError as exc:
        for d in exc.diagnostics:
            out.write(f"diagnostic code={d.code} rule={d.rule or '-'} "
                      f"at={d.line or 0}:{d.col or 0} msg={d.message}\n")
        err.write(f"{args.instance}: {len(exc.diagnostics)} diagnostic(s)\n")
        return EXIT_VALIDATION
    rep = Reporter(out, stamp=not args.no_ts)
    try:
        if getattr(args, "pred", None) is not None and args.pred not in inst.families.enrichable:
            err.write(f"error: {args.pred!r} has no generating family\n")
            return EXIT_VALIDATION
        return COMMANDS[args.command](inst, args, rep)
    except (PoolTooLarge, RecursionError) as exc:
        err.write(f"budget: {exc}\n")
        return EXIT_BUDGET
    except (CostBoundViolation, DisjointnessViolation, AssertionError) as exc:
        err.write(f"violation: {exc}\n")
        return EXIT_PROPERTY
    except (InsufficientSizes, ValueError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())

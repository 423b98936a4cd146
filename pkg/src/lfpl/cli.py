"""``lfpl`` command line: check, eval, bound, compile-tm, selftest.

Exit codes: 0 success, 1 user error (bad input, ill-typed program, failed
checks of user-supplied data), 2 internal invariant breach.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import evalop as op
from .costpoly import show_poly, verify_bound
from .corpus import Entry, growable, sized_env
from .deep import run_deep
from .syntax import LfplSyntaxError, Program, parse_program, show_type
from .typecheck import LfplTypeError, check

EXIT_OK, EXIT_USER, EXIT_INTERNAL = 0, 1, 2


class UserError(Exception):
    pass


class InternalError(Exception):
    pass


@dataclass
class Config:
    costs: str = "default"
    fuel: int = field(default_factory=op.default_fuel)
    samples: int = 32
    seed: int = 0
    json: bool = False

    def cost_model(self) -> op.CostModel:
        if self.costs in ("default", "paper-example", "zero"):
            return op.CostModel.preset(self.costs)
        path = Path(self.costs)
        if not path.is_file():
            raise UserError(f"unknown cost model {self.costs!r} (not a preset or a file)")
        try:
            return op.CostModel.from_text(path.read_text())
        except ValueError as e:
            raise UserError(f"{path}: {e}") from None


class Output:
    """Collects human lines and a JSON record; prints one or the other."""

    def __init__(self, as_json: bool):
        self.as_json = as_json
        self.record: dict = {}

    def say(self, text: str = ""):
        if not self.as_json:
            print(text)

    def put(self, **kv):
        self.record.update(kv)

    def done(self):
        if self.as_json:
            print(json.dumps(self.record, indent=2, sort_keys=True))


# ---------------------------------------------------------------- helpers


def _diag(path: str, e: Exception) -> dict:
    if isinstance(e, LfplSyntaxError):
        return {"file": path, "line": e.line, "col": e.col, "kind": "syntax error", "detail": e.msg}
    if isinstance(e, LfplTypeError):
        line, col = e.location or (0, 0)
        return {"file": path, "line": line, "col": col, "kind": e.kind, "detail": e.detail}
    return {"file": path, "line": 0, "col": 0, "kind": "error", "detail": str(e)}


def _fmt(d: dict) -> str:
    return f"{d['file']}:{d['line']}:{d['col']}: {d['kind']}: {d['detail']}"


def _load(path: str) -> Program:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise UserError(f"cannot read {path}: {e.strerror}") from None
    return parse_program(text)


def _entry(path: str, name: str) -> Entry:
    prog = _load(path)
    if name not in prog.defs:
        raise UserError(f"{path} has no definition {name!r} (has: {', '.join(prog.defs)})")
    d = prog.defs[name]
    check((), d.term, d.type, prog.positions)
    return Entry(path, name, d.term, d.type)


# ---------------------------------------------------------------- commands


def cmd_check(args, cfg: Config, out: Output) -> int:
    out.put(command="check", file=args.file)
    try:
        prog = _load(args.file)
        defs = []
        for d in prog.defs.values():
            check((), d.term, d.type, prog.positions)
            defs.append({"name": d.name, "type": show_type(d.type)})
            out.say(f"{d.name} : {show_type(d.type)}")
    except (LfplSyntaxError, LfplTypeError) as e:
        diag = _diag(args.file, e)
        out.put(ok=False, diagnostics=[diag])
        if out.as_json:
            return EXIT_USER
        print(_fmt(diag), file=sys.stderr)
        return EXIT_USER
    out.put(ok=True, definitions=defs)
    return EXIT_OK


def cmd_eval(args, cfg: Config, out: Output) -> int:
    e = _entry(args.file, args.defn)
    ctx, tt = e.applied()
    if len(args.values) != len(ctx):
        raise UserError(f"{e.name} takes {len(ctx)} argument(s), got {len(args.values)}")
    env = []
    for (x, a), text in zip(ctx, args.values):
        try:
            v = op.parse_value(text)
        except op.ValueSyntaxError as err:
            raise UserError(f"bad value {text!r}: {err}") from None
        if not op.has_type(v, a):
            raise UserError(f"value {text!r} does not have type {show_type(a)}")
        env.append((x, v))
    cm = cfg.cost_model()
    r = op.evaluate(tuple(env), tt, cm, cfg.fuel)
    out.put(command="eval", definition=e.name, type=show_type(tt.type),
            value=op.show_value(r.value), cost=r.cost, steps=r.step_count,
            size=op.size(r.value), env_size=op.size_env(env))
    out.say(op.show_value(r.value))
    out.say(f"cost: {r.cost}")
    return EXIT_OK


def _parse_range(text: str) -> range:
    lo, sep, hi = text.partition("..")
    try:
        lo_i, hi_i = int(lo), int(hi if sep else lo)
    except ValueError:
        raise UserError(f"--verify expects N0..N1, got {text!r}") from None
    if lo_i < 0 or hi_i < lo_i:
        raise UserError(f"--verify range {text!r} is empty or negative")
    return range(lo_i, hi_i + 1)


def cmd_bound(args, cfg: Config, out: Output) -> int:
    from .costpoly import PolySynth
    e = _entry(args.file, args.defn)
    ctx, tt = e.applied()
    cm = cfg.cost_model()
    pm = PolySynth(cm).term(tt)
    out.put(command="bound", definition=e.name, term_poly=show_poly(pm), coeffs=list(pm))
    out.say(show_poly(pm))
    if args.verify is None:
        return EXIT_OK
    if not growable(e):
        raise UserError(f"--verify needs first-order arguments; {e.name} has type {show_type(e.type)}")
    rng = random.Random(cfg.seed)
    rows, bad = [], 0
    out.say("n\tcost\tvalue_poly\tterm_poly\tenv_poly\tslack")
    for n in _parse_range(args.verify):
        env = sized_env(ctx, n, rng)
        size = op.size_env(op.restrict(env, tt))
        rep = verify_bound(env, tt, cm, [max(n, size)])
        row = rep.rows[0]
        bad += not row.ok
        rows.append({"n": row.n, "cost": row.cost, "value_poly": row.value_poly,
                     "term_poly": row.term_poly, "env_poly": row.env_poly, "slack": row.slack})
        out.say(f"{row.n}\t{row.cost}\t{row.value_poly}\t{row.term_poly}\t{row.env_poly}\t{row.slack}")
    out.put(rows=rows, violations=bad)
    if bad:
        raise InternalError(f"{bad} bound violation(s)")
    return EXIT_OK


def cmd_compile_tm(args, cfg: Config, out: Output) -> int:
    from .complete.tm import (TmSpecError, compile_tm, compile_tm_listout, listout_run,
                              parse_tm, run_listout, simulate)
    import itertools
    try:
        tm = parse_tm(Path(args.tmfile).read_text(), Path(args.tmfile).stem)
    except OSError as e:
        raise UserError(f"cannot read {args.tmfile}: {e.strerror}") from None
    except TmSpecError as e:
        raise UserError(f"{args.tmfile}: {e}") from None
    c = compile_tm_listout(tm) if args.list_out else compile_tm(tm)
    source = c.term.source()
    out.put(command="compile-tm", machine=tm.name, list_out=args.list_out,
            type=show_type(c.term.type), stack_bound=show_poly(c.pprime), budget_arity=c.divisor)
    if args.output:
        Path(args.output).write_text(f"-- compiled from {args.tmfile}\n\n{source}")
        out.put(output=args.output)
        out.say(f"wrote {args.output}")
    elif not args.test_only:
        out.say(source)
    out.say(f"{c.term.name} : {show_type(c.term.type)}")
    if args.test is None:
        return EXIT_OK
    passed = failed = 0
    first = None
    for n in range(args.test + 1):
        for x in itertools.product(tm.alphabet, repeat=n):
            x = list(x)
            got, want = ((listout_run(c, x), run_listout(tm, x)) if args.list_out
                         else (c.run(x), simulate(tm, x).output))
            if got == want:
                passed += 1
            else:
                failed += 1
                first = first or {"input": x, "got": got, "want": want}
    out.put(test={"max_len": args.test, "passed": passed, "failed": failed, "first_failure": first})
    out.say(f"differential test up to length {args.test}: {passed} passed, {failed} failed")
    if failed:
        out.say(f"first failure: {first}")
        raise InternalError("compiled term disagrees with the host simulator")
    return EXIT_OK


def cmd_selftest(args, cfg: Config, out: Output) -> int:
    from .suites import SUITES, SuiteConfig
    names = args.suite or list(SUITES)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise UserError(f"unknown suite(s) {unknown}; choose from {list(SUITES)}")
    sc = SuiteConfig(seed=cfg.seed, coherence_samples=cfg.samples)
    results = []
    for n in names:
        r = SUITES[n](sc)
        results.append(r)
        out.say(r.line())
    out.put(command="selftest", seed=cfg.seed,
            suites=[{"name": r.name, "ok": r.ok, "checked": r.checked,
                     "failures": r.failures[:20], "seconds": round(r.seconds, 3)} for r in results])
    ok = all(r.ok for r in results)
    out.say(f"{'all suites green' if ok else 'FAILURES'} (seed {cfg.seed})")
    return EXIT_OK if ok else EXIT_INTERNAL


# ---------------------------------------------------------------- entry


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    costs = argparse.ArgumentParser(add_help=False)
    costs.add_argument("--costs", default="default",
                       help="default | paper-example | zero | path to a 'name = natural' file")
    costs.add_argument("--fuel", type=int, default=None, help="step budget (LFPL_FUEL)")

    p = argparse.ArgumentParser(prog="lfpl", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("check", parents=[common], help="type-check every definition")
    s.add_argument("file")
    s.set_defaults(fn=cmd_check)

    s = sub.add_parser("eval", parents=[common, costs], help="evaluate a definition on values")
    s.add_argument("file")
    s.add_argument("defn", metavar="DEF")
    s.add_argument("values", nargs="*", metavar="VALUE")
    s.set_defaults(fn=cmd_eval)

    s = sub.add_parser("bound", parents=[common, costs], help="cost polynomial of a definition")
    s.add_argument("file")
    s.add_argument("defn", metavar="DEF")
    s.add_argument("--verify", metavar="N0..N1", help="measure costs on inputs of these sizes")
    s.add_argument("--seed", type=int, default=None)
    s.set_defaults(fn=cmd_bound)

    s = sub.add_parser("compile-tm", parents=[common], help="compile a .tm machine")
    s.add_argument("tmfile")
    s.add_argument("--list-out", action="store_true", help="L(A) -o L(A) variant")
    s.add_argument("--test", type=int, metavar="MAXLEN", help="differential test up to this length")
    s.add_argument("-o", "--output", help="write the emitted .lfpl here")
    s.add_argument("--test-only", action="store_true", help="do not print the emitted term")
    s.set_defaults(fn=cmd_compile_tm)

    s = sub.add_parser("selftest", parents=[common], help="run the property suites")
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--suite", action="append", help="run only this suite (repeatable)")
    s.add_argument("--samples", type=int, default=32, help="samples per closure for coherence")
    s.set_defaults(fn=cmd_selftest)
    return p


def _config(args) -> Config:
    from .suites import env_seed
    cfg = Config(json=args.json)
    cfg.costs = getattr(args, "costs", "default")
    if getattr(args, "fuel", None) is not None:
        cfg.fuel = args.fuel
    seed = getattr(args, "seed", None)
    cfg.seed = env_seed() if seed is None else seed
    cfg.samples = getattr(args, "samples", 32)
    return cfg


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = Output(args.json)
    try:
        code = args.fn(args, _config(args), out)
    except UserError as e:
        out.put(ok=False, error=str(e))
        code = EXIT_USER
        if not out.as_json:
            print(f"error: {e}", file=sys.stderr)
    except (LfplSyntaxError, LfplTypeError) as e:
        d = _diag(getattr(args, "file", "-"), e)
        out.put(ok=False, diagnostics=[d])
        code = EXIT_USER
        if not out.as_json:
            print(_fmt(d), file=sys.stderr)
    except (InternalError, op.FuelExhausted, op.EvalInvariantError) as e:
        out.put(ok=False, internal_error=f"{type(e).__name__}: {e}")
        code = EXIT_INTERNAL
        if not out.as_json:
            print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
    out.put(exit_code=code)
    out.done()
    return code


def main(argv=None) -> int:
    return run_deep(run, argv)


if __name__ == "__main__":
    sys.exit(main())

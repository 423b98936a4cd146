"""Property suites shared by ``lfpl selftest`` and the acceptance tests.

Each suite returns a :class:`SuiteResult` counting the cases it checked and
listing every failure it found.
"""

from __future__ import annotations

import itertools
import os
import random
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import evalop as op
from .costpoly import CostPoly, PolySynth, poly_eval, show_poly, verify_bound
from .corpus import CORPUS_DIR, Entry, load_entries, random_env
from .evalden import InjD, STAR, coherence_check, den_of_value
from .gen import GenConfig, NoTerm, Sample, TermGen, samples
from .syntax import DIAMOND, Annot, App, Sum, UNIT, Var
from .typecheck import check

DEFAULT_SEED = 20240917


def env_seed(default: int = DEFAULT_SEED) -> int:
    return int(os.environ.get("LFPL_SEED", default))


@dataclass
class SuiteConfig:
    seed: int = field(default_factory=env_seed)
    random_terms: int = 500
    envs_per_entry: int = 3
    coherence_samples: int = 32
    stack_scripts: int = 200
    stack_script_len: int = 8
    stack_ns: tuple = (0, 1, 2, 3, 4)
    tm_maxlen: int = 4
    corpus: Path = CORPUS_DIR


@dataclass
class SuiteResult:
    name: str
    checked: int = 0
    failures: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.failures and self.checked > 0

    def fail(self, msg: str):
        self.failures.append(msg)

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        extra = f"; first failure: {self.failures[0]}" if self.failures else ""
        return (f"{status} {self.name}: {self.checked} checked, "
                f"{len(self.failures)} failures, {self.seconds:.2f}s{extra}")


def _timed(name):
    def wrap(fn):
        def run(cfg: SuiteConfig | None = None) -> SuiteResult:
            res = SuiteResult(name)
            t0 = time.perf_counter()
            fn(cfg or SuiteConfig(), res)
            res.seconds = time.perf_counter() - t0
            return res
        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run
    return wrap


# ---------------------------------------------------------------- population


@dataclass
class Case:
    label: str
    ctx: tuple
    typed: object
    env: tuple


def population(cfg: SuiteConfig) -> list[Case]:
    """Corpus definitions applied to random inputs, then random well-typed terms."""
    out = []
    rng = random.Random(cfg.seed)
    for e in load_entries(cfg.corpus):
        ctx, tt = e.applied()
        for i in range(cfg.envs_per_entry):
            out.append(Case(f"{e.label}#{i}", ctx, tt, random_env(ctx, rng)))
    for i, s in enumerate(samples(cfg.seed, cfg.random_terms)):
        out.append(Case(f"random#{i}", s.ctx, s.typed, s.env))
    return out


_POP_CACHE: dict = {}


def cached_population(cfg: SuiteConfig) -> list[Case]:
    key = (cfg.seed, cfg.random_terms, cfg.envs_per_entry, str(cfg.corpus))
    if key not in _POP_CACHE:
        _POP_CACHE[key] = population(cfg)
    return _POP_CACHE[key]


# ---------------------------------------------------------------- suites


@_timed("reverse-bound")
def reverse_bound(cfg, res):
    """Reverse on unit lists: bound is 4 + 2*n and measured cost stays below it."""
    from .syntax import parse_program
    prog = parse_program((cfg.corpus / "reverse.lfpl").read_text())
    e = Entry("reverse.lfpl", "reverse", prog.term("reverse"), prog.type("reverse"))
    ctx, tt = e.applied()
    cm = op.CostModel.example_costs()
    p = PolySynth(cm).term(tt)
    res.checked += 1
    if show_poly(p) != "4 + 2*n":
        res.fail(f"bound is {show_poly(p)}, expected 4 + 2*n")
    for n in range(11):
        r = op.evaluate({"arg0": op.unit_list(n)}, tt, cm)
        res.checked += 1
        if r.cost > 2 * n + 4:
            res.fail(f"n={n}: cost {r.cost} exceeds {2 * n + 4}")


@_timed("soundness")
def soundness(cfg, res):
    """cost + P_v(n) <= P_M(n) + P_eta(n) for n in |eta| .. |eta|+5."""
    for cm in (op.CostModel(), op.CostModel.example_costs()):
        for c in cached_population(cfg):
            rep = verify_bound(c.env, c.typed, cm)
            res.checked += 1
            for row in rep.violations():
                res.fail(f"{c.label}: n={row.n} lhs={row.lhs} rhs={row.rhs}")


@_timed("non-size-increasing")
def non_size_increasing(cfg, res):
    """size(v) <= size(eta); no closed term of type diamond is ever generated."""
    for c in cached_population(cfg):
        r = op.evaluate(c.env, c.typed)
        eta = op.restrict(c.env, c.typed)
        res.checked += 1
        if op.size(r.value) > op.size_env(eta):
            res.fail(f"{c.label}: size {op.size(r.value)} > {op.size_env(eta)}")
    g = TermGen(random.Random(cfg.seed))
    for i in range(200):
        res.checked += 1
        try:
            t = g.term({}, DIAMOND, g.cfg.max_depth)
            res.fail(f"generator built a closed diamond: {t}")
        except NoTerm:
            pass
    for s in samples(cfg.seed + 1, 200, closed=True):
        res.checked += 1
        if s.typed.type == DIAMOND:
            res.fail("closed sample of type diamond")


def _permuted(env, rng: random.Random) -> tuple:
    items = list(op.as_env(env))
    rng.shuffle(items)
    decoys = [(f"decoy{i}", op.unit_list(i)) for i in range(2)]
    return tuple(decoys + items)


@_timed("determinism-preservation")
def determinism(cfg, res):
    """Same (v, c) under a permuted environment with decoys; v has the term's type."""
    rng = random.Random(cfg.seed)
    for c in cached_population(cfg):
        a = op.evaluate(c.env, c.typed)
        b = op.evaluate(_permuted(c.env, rng), c.typed)
        res.checked += 1
        if (a.value, a.cost) != (b.value, b.cost):
            res.fail(f"{c.label}: results differ ({a.cost} vs {b.cost})")
        if not op.has_type(a.value, c.typed.type):
            res.fail(f"{c.label}: result is not of type")


@_timed("coherence")
def coherence(cfg, res):
    """Operational results agree with the denotation of the term."""
    for i, c in enumerate(cached_population(cfg)):
        r = coherence_check(c.typed, c.env, samples=cfg.coherence_samples, seed=cfg.seed + i)
        res.checked += 1
        if not r.ok:
            res.fail(f"{c.label}: mismatch at {r.mismatch}")


def stack_zoo(elem=None):
    from .complete import (stack_add, stack_const, stack_inductive, stack_poly,
                           stack_weaken)
    a = elem or Sum(UNIT, UNIT)
    impls = [stack_const(a, c) for c in range(4)]
    impls += [stack_inductive(stack_const(a, 1)), stack_inductive(stack_const(a, 2)),
              stack_inductive(stack_inductive(stack_const(a, 1)))]
    impls += [stack_weaken(stack_const(a, 2)), stack_weaken(stack_inductive(stack_const(a, 1)))]
    impls += [stack_add(stack_const(a, 1), stack_const(a, 2)),
              stack_add(stack_inductive(stack_const(a, 1)), stack_weaken(stack_const(a, 1)))]
    impls += [stack_poly(a, p) for p in ([2], [1, 1], [0, 0, 1], [2, 1, 1])]
    return impls


@_timed("stacks")
def stacks(cfg, res):
    """Every combinator-built stack behaves like a bounded host stack."""
    from .complete.stacks import check_stack, edge_scripts, m_den, m_value, random_script
    elems = [InjD(1, STAR), InjD(2, STAR)]
    rng = random.Random(cfg.seed)
    for impl in stack_zoo():
        for n in cfg.stack_ns:
            scripts = edge_scripts(impl, n, elems)
            scripts += [random_script(rng, elems, rng.randint(0, cfg.stack_script_len))
                        for _ in range(cfg.stack_scripts)]
            for sc in scripts:
                res.checked += 1
                f = check_stack(impl, n, sc)
                if f:
                    res.fail(f"{impl} n={n}: {f}")
                    break
    for n, k in itertools.product(range(5), range(4)):
        v = m_value(n, k)
        res.checked += 1
        if den_of_value(v) != m_den(n, k) or op.size(v) != n * k:
            res.fail(f"m_value({n},{k}) does not round-trip")


@_timed("iterator-law")
def iterator_law(cfg, res):
    """A counting step under iter_poly(f, P) fires exactly P(n) times."""
    from .complete.iterate import counter_den, counter_value, counting_step, iter_poly
    from .evalden import PairD, den_apply, unit_list_d
    width = 6
    f = counting_step(width)
    for p in ([0], [3], [1, 1], [0, 2], [1, 0, 2], [2, 1, 1], [0, 0, 1]):
        it = iter_poly(f, CostPoly(p))
        for n in range(6):
            out = den_apply(it.den, PairD(counter_den(width, 0), unit_list_d(n)))
            got, want = counter_value(out.left, width), poly_eval(CostPoly(p), n) % (1 << width)
            res.checked += 1
            if got != want or out.right != unit_list_d(n):
                res.fail(f"P={p} n={n}: {got} applications, expected {want}")


TM_NAMES = ("bitflip", "identity", "parity_erase", "identity_halt", "unary_parity")


@_timed("tm-completeness")
def tm_completeness(cfg, res):
    """Compiled machines agree with the host simulator on every short input."""
    from .complete.tm import (compile_tm, compile_tm_listout, listout_run, parse_tm,
                              run_listout, simulate)
    for name in TM_NAMES:
        tm = parse_tm((cfg.corpus / "tm" / f"{name}.tm").read_text(), name)
        c, cl = compile_tm(tm), compile_tm_listout(tm)
        for n in range(cfg.tm_maxlen + 1):
            for x in itertools.product(tm.alphabet, repeat=n):
                x = list(x)
                res.checked += 2
                if c.run(x) != simulate(tm, x).output:
                    res.fail(f"{name} {x}: stack output differs")
                if listout_run(cl, x) != run_listout(tm, x):
                    res.fail(f"{name} {x}: list output differs")


@_timed("budget")
def budget(cfg, res):
    """P'(m) >= P(n) + n with (m, r) = divmod(n, k+1)."""
    from .complete.tm import budget_poly, parse_tm
    bounds = [parse_tm(f.read_text()).bound for f in sorted((cfg.corpus / "tm").glob("*.tm"))
              if not f.stem.startswith("bad_")]
    bounds += [CostPoly(p) for p in ([0], [2], [1, 1], [0, 0, 1], [2, 1, 1], [1, 0, 2], [0, 0, 0, 1])]
    for p in bounds:
        k = p.degree
        pp = budget_poly(p)
        for n in range(51):
            m, _ = divmod(n, k + 1)
            res.checked += 1
            if poly_eval(pp, m) < poly_eval(p, n) + n:
                res.fail(f"P={show_poly(p)} n={n}: P'({m}) = {poly_eval(pp, m)}")


SUITES = {
    "reverse-bound": reverse_bound,
    "soundness": soundness,
    "nsi": non_size_increasing,
    "determinism": determinism,
    "coherence": coherence,
    "stacks": stacks,
    "iterators": iterator_law,
    "tm": tm_completeness,
    "budget": budget,
}

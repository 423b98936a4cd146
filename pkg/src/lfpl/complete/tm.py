"""Compiling polynomial-time Turing machines into closed terms.

Tape: two bounded stacks around a head cell.  Cells have type ``1 + A``
(left injection = blank); states have type ``1 + Q`` (left injection =
halted).  The input ``x1 .. xn`` is loaded so the head sits on ``xn`` and
the half opposite the output half holds ``x(n-1) .. x1`` (nearest first).
Each step writes, then moves: the written cell is pushed on the half being
left and the head is popped from the half being entered (blank when empty).
After ``P(n)`` steps the head cell is pushed onto the output half, which is
the result, read head-outward.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property

from ..costpoly import CostPoly, poly_add, poly_compose, poly_eval, show_poly
from ..evalden import DenValue, InjD, ListD, PairD, STAR, StackD
from ..syntax import Arrow, List, Sum, Tensor, Type, UNIT, UNIT_LIST, show_type
from .build import Closed, arrow, fin, fin_term, lfpl, mt, ty
from .encode import divmod_term, encode_function, inhabitants
from .iterate import iter_poly, iter_sharp
from .stacks import StackImpl, stack_poly
from .stdlib import append, lunfold, reverse

HALT = "HALT"
BLANK = "_"


class TmSpecError(ValueError):
    pass


@dataclass
class TmSpec:
    """A single-tape machine; ``None`` stands for the blank symbol and the halt state."""

    states: list[str]
    alphabet: list[str]
    delta: dict = field(repr=False)  # (state, sym|None) -> (state|None, sym|None, "L"|"R")
    bound: CostPoly
    out: str = "right"
    name: str = "tm"

    def __post_init__(self):
        self.bound = CostPoly(self.bound)
        if self.out not in ("right", "left"):
            raise TmSpecError(f"out must be 'right' or 'left', not {self.out!r}")
        if not self.states:
            raise TmSpecError("at least one state is required")
        if not self.alphabet:
            raise TmSpecError("the alphabet must not be empty")
        if len(set(self.states)) != len(self.states) or len(set(self.alphabet)) != len(self.alphabet):
            raise TmSpecError("duplicate state or symbol names")
        missing = [(q, a) for q in self.states for a in [None, *self.alphabet]
                   if (q, a) not in self.delta]
        if missing:
            q, a = missing[0]
            raise TmSpecError(f"transition function is not total: no rule for ({q},{a or BLANK})")
        for (q, a), (q2, a2, d) in self.delta.items():
            if q not in self.states or (a is not None and a not in self.alphabet):
                raise TmSpecError(f"rule for unknown pair ({q},{a or BLANK})")
            if q2 is not None and q2 not in self.states:
                raise TmSpecError(f"rule ({q},{a or BLANK}) targets unknown state {q2}")
            if a2 is not None and a2 not in self.alphabet:
                raise TmSpecError(f"rule ({q},{a or BLANK}) writes unknown symbol {a2}")
            if d not in ("L", "R"):
                raise TmSpecError(f"rule ({q},{a or BLANK}) has direction {d!r}")

    @property
    def degree(self) -> int:
        return self.bound.degree


def parse_tm(text: str, name: str = "tm") -> TmSpec:
    """Read the line-oriented ``.tm`` format (``#`` starts a comment)."""
    states = alphabet = None
    bound = None
    out = "right"
    delta = {}
    rule = re.compile(r"^(\S+)\s*,\s*(\S+)\s*->\s*(\S+)\s*,\s*(\S+)\s*,\s*([LR])$")
    for i, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#")[0].strip()
        if not line:
            continue
        key, sep, rest = line.partition(":")
        if sep and "->" not in line:
            key = key.strip()
            words = rest.split()
            if key == "states":
                states = words
            elif key == "alphabet":
                alphabet = words
            elif key == "bound":
                try:
                    bound = CostPoly([int(w) for w in words])
                except ValueError as e:
                    raise TmSpecError(f"line {i}: bad bound: {e}") from None
            elif key == "out":
                out = rest.strip()
            else:
                raise TmSpecError(f"line {i}: unknown header {key!r}")
            continue
        m = rule.match(line)
        if not m:
            raise TmSpecError(f"line {i}: expected 'q,s -> q2,s2,L|R'")
        q, a, q2, a2, d = m.groups()
        sym = lambda s: None if s == BLANK else s
        key = (q, sym(a))
        if key in delta:
            raise TmSpecError(f"line {i}: duplicate rule for ({q},{a})")
        delta[key] = (None if q2 == HALT else q2, sym(a2), d)
    if states is None or alphabet is None or bound is None:
        raise TmSpecError("states:, alphabet: and bound: headers are required")
    return TmSpec(states, alphabet, delta, bound, out, name)


# ---------------------------------------------------------------- host simulator


@dataclass
class TmRun:
    output: list  # items of the output half, head first; None = blank
    steps: int
    halted: bool


def simulate(tm: TmSpec, x: list[str], steps: int | None = None) -> TmRun:
    """Two-stack reference semantics identical to the compiled term."""
    n = len(x)
    budget = poly_eval(tm.bound, n) if steps is None else steps
    load = list(x)
    head = load.pop() if load else None
    opposite = list(reversed(load))  # top of stack first
    half = {"L": opposite, "R": []} if tm.out == "right" else {"L": [], "R": opposite}
    state = tm.states[0]
    taken = 0
    for _ in range(budget):
        if state is None:
            break
        state, write, d = tm.delta[(state, head)]
        taken += 1
        leave, enter = ("R", "L") if d == "L" else ("L", "R")
        half[leave].insert(0, write)
        head = half[enter].pop(0) if half[enter] else None
    out_half = half["R"] if tm.out == "right" else half["L"]
    return TmRun([head] + out_half, taken, state is None)


def run_listout(tm: TmSpec, x: list[str]) -> list[str]:
    """List-to-list reading: non-blank symbols among the first |x| output items."""
    items = simulate(tm, x).output[: len(x)]
    return [a for a in items if a is not None]


# ---------------------------------------------------------------- budget


def budget_poly(p, k: int | None = None) -> CostPoly:
    """``P'(m) = (k+1)(m+1) + P((k+1)(m+1))`` with ``k = deg P`` by default."""
    p = CostPoly(p)
    k = p.degree if k is None else k
    lin = CostPoly([k + 1, k + 1])
    return poly_add(lin, poly_compose(p, lin))


# ---------------------------------------------------------------- compiler


@dataclass(eq=False)
class CompiledTM:
    tm: TmSpec
    term: Closed
    stack: StackImpl
    divisor: int
    pprime: CostPoly
    elem: Type
    alpha: Type

    def budget_n(self, x_len: int) -> int:
        return x_len // self.divisor

    def items(self, x_len: int, s: DenValue) -> list:
        """Tape cells held by the output stack, as host symbols (None = blank)."""
        return [self.decode_cell(c) for c in self.stack.items(self.budget_n(x_len), s)]

    def decode_cell(self, c: DenValue):
        return None if c.index == 1 else self.decode_symbol(c.value)

    def decode_symbol(self, a: DenValue) -> str:
        return self.tm.alphabet[inhabitants(self.alpha).index(a)]

    def encode_input(self, x: list[str]) -> ListD:
        syms = inhabitants(self.alpha)
        return ListD(tuple(syms[self.tm.alphabet.index(a)] for a in x))

    def run(self, x: list[str]) -> list:
        return self.items(len(x), self.term.den(self.encode_input(x)))


def _join_src(k1: int, ms: str, rem: str) -> str:
    """Append the k1 budget lists and the remainder back into one list."""
    names = [f"{ms}{i}" for i in range(k1)]
    pat = ", ".join(names)
    body = rem
    for nme in reversed(names):
        body = f"app {nme} ({body})"
    if k1 == 1:
        return f"(letp ({names[0]}, {ms}u) = ({ms}, <>) in {body})"
    return f"(letp ({pat}) = {ms} in {body})"


def _transition(tm: TmSpec, q_t: Type, a_t: Type) -> Closed:
    cell = Sum(UNIT, a_t)
    qs, syms = inhabitants(q_t), inhabitants(a_t)
    st_of = {q: d for q, d in zip(tm.states, qs)}
    sym_of = {a: d for a, d in zip(tm.alphabet, syms)}

    def enc_cell(a):
        return InjD(1, STAR) if a is None else InjD(2, sym_of[a])

    def g(v):
        q = tm.states[qs.index(v.left)]
        a = None if v.right.index == 1 else tm.alphabet[syms.index(v.right.value)]
        q2, a2, d = tm.delta[(q, a)]
        st = InjD(1, STAR) if q2 is None else InjD(2, st_of[q2])
        return PairD(st, PairD(enc_cell(a2), InjD(1 if d == "L" else 2, STAR)))

    out_t = Tensor(Sum(UNIT, q_t), Tensor(cell, Sum(UNIT, UNIT)))
    return encode_function(Tensor(q_t, cell), out_t, g)


@dataclass(eq=False)
class _Parts:
    tm: TmSpec
    alpha: Type
    q_t: Type
    cell: Type
    stack: StackImpl
    k1: int
    pprime: CostPoly
    cfg: Type
    loader: Closed
    step: Closed
    iterated: Closed
    divmod: Closed
    app: Closed


def _parts(tm: TmSpec) -> _Parts:
    a_t, q_t = fin(len(tm.alphabet)), fin(len(tm.states))
    cell = Sum(UNIT, a_t)
    k = tm.degree
    k1 = k + 1
    pprime = budget_poly(tm.bound, k)
    stack = stack_poly(cell, pprime, arity=k1)
    s_t, m_t = stack.impl, mt(k1)
    tape = Tensor(s_t, Tensor(cell, s_t))
    cfg = Tensor(Sum(UNIT, q_t), tape)
    dm, app = divmod_term(k), append(UNIT)
    gt = _transition(tm, q_t, a_t)
    join = _join_src(k1, "ms", "rem")
    join3 = _join_src(k1, "ms3", "rem")

    head_of = "(case {o} | inj1 _ => inj1 <> | inj2 e => e)"
    move_l = f"""letp (ms2, p1) = spush ms (w, rh) in letp (rh2, _) = p1 in
                 letp (ms3, p2) = spop ms2 lh in letp (lh2, o) = p2 in
                 ((q2, (lh2, ({head_of.format(o="o")}, rh2))), {join3})"""
    move_r = f"""letp (ms2, p1) = spush ms (w, lh) in letp (lh2, _) = p1 in
                 letp (ms3, p2) = spop ms2 rh in letp (rh2, o) = p2 in
                 ((q2, (lh2, ({head_of.format(o="o")}, rh2))), {join3})"""
    step = lfpl("tm_step", f"""
        lam s . letp (cfg, dd) = s in
        letp (ms, rem) = divmod dd in
        letp (st, tape) = cfg in
        case st
        | inj1 u => ((inj1 u, tape), {join})
        | inj2 q =>
            letp (lh, rt) = tape in letp (hd, rh) = rt in
            letp (q2, wd) = g (q, hd) in letp (w, dir) = wd in
            case dir
            | inj1 _ => {move_l}
            | inj2 _ => {move_r}""",
        Arrow(Tensor(cfg, UNIT_LIST), Tensor(cfg, UNIT_LIST)),
        divmod=dm, app=app, g=gt, spush=stack.push, spop=stack.pop)

    # loader: push x1 first so that x(n-1) ends up nearest the head
    chain = Arrow(Tensor(m_t, s_t), Tensor(m_t, s_t))
    loader = lfpl("tm_load", f"""
        lam x . rec x
        | nil => (lam c . c, nil)
        | cons (d, a, r) => letp (g, pool) = r in
            ((lam c . letp (mm, s) = c in letp (mm2, q) = spush mm (inj2 a, s) in
                      letp (s2, _) = q in g (mm2, s2)),
             cons (d, <>, pool))""",
        Arrow(List(a_t), Tensor(chain, UNIT_LIST)), spush=stack.push)
    iterated = iter_poly(step, tm.bound)
    return _Parts(tm, a_t, q_t, cell, stack, k1, pprime, cfg, loader, step, iterated, dm, app)


def _run_src(parts: _Parts) -> str:
    """Source of the body shared by both output forms; binds ``cfg`` and ``dd``."""
    q0 = fin_term(len(parts.tm.states), 0)
    if parts.tm.out == "right":
        start = "(inj2 ({q0}), (s0, ({head}, emp)))"
    else:
        start = "(inj2 ({q0}), (emp, ({head}, s0)))"
    start = start.format(q0=q0, head="(case hd0 | inj1 _ => inj1 <> | inj2 e => e)")
    return f"""
        letp (g, pool) = load x in
        letp (ms, rem) = divmod pool in
        letp (ms1, sp) = g (ms, emp) in
        letp (ms2, pq) = spop ms1 sp in letp (s0, hd0) = pq in
        letp (cfg, dd) = run ({start}, {_join_src(parts.k1, "ms2", "rem")}) in"""


def _output_src(parts: _Parts) -> str:
    """Binds ``out`` (the output stack) and ``dd`` (all n diamonds)."""
    if parts.tm.out == "right":
        target, pushed = "rh", "(hd, rh)"
    else:
        target, pushed = "lh", "(hd, lh)"
    return f"""
        letp (st, tape) = cfg in letp (lh, rt) = tape in letp (hd, rh) = rt in
        letp (ms, rem) = divmod dd in
        letp (ms2, q) = spush ms {pushed} in letp (out, _) = q in"""


def compile_tm(tm: TmSpec) -> CompiledTM:
    """Closed ``L(A) -o S`` whose result stack holds the final output half."""
    p = _parts(tm)
    src = f"lam x . {_run_src(p)} {_output_src(p)} out"
    term = lfpl(f"{tm.name}_tm", src, Arrow(List(p.alpha), p.stack.impl),
                load=p.loader, divmod=p.divmod, emp=p.stack.empty, spop=p.stack.pop,
                spush=p.stack.push, run=p.iterated, app=p.app)
    return CompiledTM(tm, term, p.stack, p.k1, p.pprime, p.cell, p.alpha)


def compile_tm_listout(tm: TmSpec) -> CompiledTM:
    """Closed ``L(A) -o L(A)``: the non-blank cells among the first n output items."""
    p = _parts(tm)
    s_t, a_t = p.stack.impl, p.alpha
    builder = Arrow(UNIT_LIST, List(a_t))
    xs = Tensor(s_t, builder)
    drain = lfpl("tm_drain", f"""
        lam p . letp (xs, dd) = p in letp (s, b) = xs in
        letp (ms, rem) = divmod dd in
        letp (ms2, q) = spop ms s in letp (s2, o) = q in
        ((s2, case o
              | inj1 _ => b
              | inj2 e => case e
                | inj1 _ => b
                | inj2 a => lam l . case lunfold l
                  | inj1 _ => nil
                  | inj2 (d, _, l2) => cons (d, a, b l2)),
         {_join_src(p.k1, "ms2", "rem")})""",
        Arrow(Tensor(xs, UNIT_LIST), Tensor(xs, UNIT_LIST)),
        divmod=p.divmod, app=p.app, spop=p.stack.pop, lunfold=lunfold(UNIT))
    src = f"""lam x . {_run_src(p)} {_output_src(p)}
        letp (xs, dd2) = drain ((out, lam _ . nil), {_join_src(p.k1, "ms2", "rem")}) in
        letp (s, b) = xs in rev (b dd2)"""
    term = lfpl(f"{tm.name}_list", src, Arrow(List(a_t), List(a_t)),
                load=p.loader, divmod=p.divmod, emp=p.stack.empty, spop=p.stack.pop,
                spush=p.stack.push, run=p.iterated, drain=iter_sharp(drain),
                app=p.app, rev=reverse(a_t))
    return CompiledTM(tm, term, p.stack, p.k1, p.pprime, p.cell, p.alpha)


def listout_run(c: CompiledTM, x: list[str]) -> list[str]:
    out = c.term.den(c.encode_input(x))
    return [c.decode_symbol(a) for a in out.items]

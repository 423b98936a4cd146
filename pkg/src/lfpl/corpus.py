"""Loading the program corpus and turning definitions into runnable judgements."""

from __future__ import annotations

import random
from dataclasses import dataclass
from pathlib import Path

from . import evalop as op
from .gen import NoTerm, TermGen
from .syntax import Annot, App, Arrow, LfplSyntaxError, Type, Var, is_first_order, parse_program
from .typecheck import LfplTypeError, TypedTerm, check

CORPUS_DIR = Path(__file__).resolve().parents[2] / "corpus"


@dataclass(eq=False)
class Entry:
    file: str
    name: str
    term: object
    type: Type

    @property
    def label(self) -> str:
        return f"{Path(self.file).stem}:{self.name}"

    def args(self) -> list[Type]:
        out, t = [], self.type
        while isinstance(t, Arrow):
            out.append(t.arg)
            t = t.res
        return out

    def applied(self) -> tuple[tuple, TypedTerm]:
        """``def x1 .. xk`` over fresh variables, one per curried argument."""
        ctx = tuple((f"arg{i}", a) for i, a in enumerate(self.args()))
        body = Annot(self.term, self.type)
        for x, _ in ctx:
            body = App(body, Var(x))
        return ctx, check(ctx, body)


def load_entries(root: Path | str | None = None, pattern: str = "**/*.lfpl",
                 rejected: list | None = None) -> list[Entry]:
    """Every definition of every corpus file that parses and checks.

    Files that fail are skipped whole and, if ``rejected`` is given, recorded
    there as ``(path, error)``.
    """
    root = Path(root or CORPUS_DIR)
    out = []
    for f in sorted(root.glob(pattern)):
        try:
            prog = parse_program(f.read_text())
            entries = []
            for d in prog.defs.values():
                check((), d.term, d.type)
                entries.append(Entry(str(f), d.name, d.term, d.type))
        except (LfplTypeError, LfplSyntaxError) as e:
            if rejected is not None:
                rejected.append((str(f), e))
            continue
        out.extend(entries)
    return out


def random_env(ctx, rng: random.Random, max_len: int = 5) -> tuple:
    """Random values for ``ctx``; lists get up to ``max_len`` cells."""
    g = TermGen(rng)
    env = []
    for x, a in ctx:
        env.append((x, _value(g, a, rng, max_len)))
    return tuple(env)


def _value(g: TermGen, a: Type, rng: random.Random, max_len: int):
    from .evalden import ListD, StackD, random_den, value_of_den
    from .syntax import List, Stack
    if isinstance(a, (List, Stack)) and is_first_order(a):
        items = [value_of_den(random_den(a.elem, rng), a.elem) for _ in range(rng.randint(0, max_len))]
        return op.list_value(items) if isinstance(a, List) else op.stack_value(items)
    for _ in range(10):
        try:
            return g.value(a)
        except NoTerm:
            continue
    raise NoTerm(f"no value for {a}")


def sized_value(a: Type, n: int, rng: random.Random):
    """A first-order value of size at most ``n``, as close to ``n`` as the type allows."""
    from .evalden import random_den, value_of_den
    from .syntax import Diamond, List, Stack, Sum, Tensor, Tree, Unit

    if isinstance(a, Diamond):
        return op.DIAMOND_V
    if isinstance(a, Unit):
        return op.NULL_V
    if isinstance(a, Sum):
        for i in rng.sample([1, 2], 2):
            side = a.left if i == 1 else a.right
            if not (isinstance(side, Diamond) and n < 1):
                return op.InjV(i, sized_value(side, n, rng))
        return op.InjV(1, sized_value(a.left, n, rng))
    if isinstance(a, Tensor):
        left = sized_value(a.left, n, rng)
        return op.PairV(left, sized_value(a.right, n - op.size(left), rng))
    if isinstance(a, (List, Stack)):
        items, used = [], 0
        per = op.size(sized_value(a.elem, 0, rng)) + (1 if isinstance(a, List) else 0)
        while per and used + per <= n or (not per and len(items) < n):
            items.append(sized_value(a.elem, 0, rng))
            used += per
        return op.list_value(items) if isinstance(a, List) else op.stack_value(items)
    if isinstance(a, Tree):
        t = op.LEAF_V
        label_size = op.size(sized_value(a.elem, 0, rng))
        used = 0
        while used + 1 + label_size <= n:
            t = op.NodeV(sized_value(a.elem, 0, rng), t, op.LEAF_V)
            used += 1 + label_size
        return t
    raise ValueError(f"no sized values of a higher-order type")


def growable(entry: Entry) -> bool:
    return all(is_first_order(a) for a in entry.args())


def sized_env(ctx, n: int, rng: random.Random) -> tuple:
    """Put the whole size budget on the first argument, the rest minimal."""
    env = []
    for i, (x, a) in enumerate(ctx):
        env.append((x, sized_value(a, n if i == 0 else 0, rng)))
    return tuple(env)

"""Abstract and concrete syntax of LFPL+ types and terms.

Types and terms are immutable dataclasses compared structurally.  The
concrete syntax follows the usual listing style::

    revAppend : L(1) -o L(1) -o L(1)
    revAppend = lam l1 . rec l1
      | nil => lam l2 . l2
      | cons (d, x, r) => lam l2 . r (cons (d, x, l2))

Binding-site tuple patterns (``lam (x, n) . M``, ``inj2 (d, x, xs) => M``)
desugar to nested ``letp`` with generated names.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Union


# ---------------------------------------------------------------- types


@dataclass(frozen=True)
class Diamond:
    pass


@dataclass(frozen=True)
class Unit:
    pass


@dataclass(frozen=True)
class Sum:
    left: "Type"
    right: "Type"


@dataclass(frozen=True)
class Tensor:
    left: "Type"
    right: "Type"


@dataclass(frozen=True)
class Arrow:
    arg: "Type"
    res: "Type"


@dataclass(frozen=True)
class List:
    elem: "Type"


@dataclass(frozen=True)
class Prod:
    """Lazy (additive) product ``A & B``."""

    left: "Type"
    right: "Type"


@dataclass(frozen=True)
class Stack:
    elem: "Type"


@dataclass(frozen=True)
class Tree:
    elem: "Type"


Type = Union[Diamond, Unit, Sum, Tensor, Arrow, List, Prod, Stack, Tree]

DIAMOND = Diamond()
UNIT = Unit()
UNIT_LIST = List(UNIT)


def is_diamond_free(a: Type) -> bool:
    """True iff ``a`` is built from unit, sums and tensors only."""
    if isinstance(a, Unit):
        return True
    if isinstance(a, (Sum, Tensor)):
        return is_diamond_free(a.left) and is_diamond_free(a.right)
    return False


def is_first_order(a: Type) -> bool:
    """No arrows or lazy products anywhere inside ``a``."""
    if isinstance(a, (Arrow, Prod)):
        return False
    if isinstance(a, (Sum, Tensor)):
        return is_first_order(a.left) and is_first_order(a.right)
    if isinstance(a, (List, Stack, Tree)):
        return is_first_order(a.elem)
    return True


def tensor_of(types: list[Type]) -> Type:
    """Right-nested tensor ``A1 * (A2 * ...)``; unit when empty."""
    if not types:
        return UNIT
    out = types[-1]
    for t in reversed(types[:-1]):
        out = Tensor(t, out)
    return out


# ---------------------------------------------------------------- terms


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Null:
    pass


@dataclass(frozen=True)
class Inj:
    index: int
    body: "Term"


@dataclass(frozen=True)
class Case:
    scrut: "Term"
    left_var: str
    left: "Term"
    right_var: str
    right: "Term"


@dataclass(frozen=True)
class Pair:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class LetPair:
    scrut: "Term"
    left_var: str
    right_var: str
    body: "Term"


@dataclass(frozen=True)
class Lam:
    var: str
    body: "Term"


@dataclass(frozen=True)
class App:
    fn: "Term"
    arg: "Term"


@dataclass(frozen=True)
class Nil:
    pass


@dataclass(frozen=True)
class Cons:
    diamond: "Term"
    head: "Term"
    tail: "Term"


@dataclass(frozen=True)
class Rec:
    scrut: "Term"
    nil_case: "Term"
    d_var: str
    h_var: str
    t_var: str
    cons_case: "Term"


@dataclass(frozen=True)
class Record:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Proj:
    index: int
    body: "Term"


@dataclass(frozen=True)
class Empty:
    pass


@dataclass(frozen=True)
class Push:
    head: "Term"
    tail: "Term"


@dataclass(frozen=True)
class Pop:
    scrut: "Term"
    empty_case: "Term"
    h_var: str
    t_var: str
    push_case: "Term"


@dataclass(frozen=True)
class Leaf:
    pass


@dataclass(frozen=True)
class Node:
    diamond: "Term"
    label: "Term"
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class TRec:
    scrut: "Term"
    leaf_case: "Term"
    d_var: str
    x_var: str
    l_var: str
    r_var: str
    node_case: "Term"


@dataclass(frozen=True)
class Annot:
    """Type ascription ``(M : A)``; also how inlined definitions appear."""

    body: "Term"
    type: Type


Term = Union[
    Var, Null, Inj, Case, Pair, LetPair, Lam, App, Nil, Cons, Rec, Record,
    Proj, Empty, Push, Pop, Leaf, Node, TRec, Annot,
]

WILDCARD = "_"


def binders(t: Term) -> dict[str, tuple[str, ...]]:
    """Binders introduced per sub-term field name (used by free_vars)."""
    if isinstance(t, Case):
        return {"left": (t.left_var,), "right": (t.right_var,)}
    if isinstance(t, LetPair):
        return {"body": (t.left_var, t.right_var)}
    if isinstance(t, Lam):
        return {"body": (t.var,)}
    if isinstance(t, Rec):
        return {"cons_case": (t.d_var, t.h_var, t.t_var)}
    if isinstance(t, Pop):
        return {"push_case": (t.h_var, t.t_var)}
    if isinstance(t, TRec):
        return {"node_case": (t.d_var, t.x_var, t.l_var, t.r_var)}
    return {}


def children(t: Term) -> Iterator[tuple[str, Term]]:
    for name in getattr(t, "__dataclass_fields__", {}):
        v = getattr(t, name)
        if isinstance(v, TERM_CLASSES):
            yield name, v


def free_vars(t: Term) -> frozenset[str]:
    if isinstance(t, Var):
        return frozenset([t.name])
    out: set[str] = set()
    bound = binders(t)
    for name, sub in children(t):
        out |= free_vars(sub) - set(bound.get(name, ()))
    return frozenset(out)


def term_size(t: Term) -> int:
    return 1 + sum(term_size(s) for _, s in children(t))


TERM_CLASSES = (
    Var, Null, Inj, Case, Pair, LetPair, Lam, App, Nil, Cons, Rec, Record,
    Proj, Empty, Push, Pop, Leaf, Node, TRec, Annot,
)
TYPE_CLASSES = (Diamond, Unit, Sum, Tensor, Arrow, List, Prod, Stack, Tree)


# ---------------------------------------------------------------- printing


def show_type(a: Type, prec: int = 0) -> str:
    """Render a type; prec 0 = arrow level, 1 = sum, 2 = tensor, 3 = atom."""
    if isinstance(a, Diamond):
        return "diam"
    if isinstance(a, Unit):
        return "1"
    if isinstance(a, List):
        return f"L({show_type(a.elem)})"
    if isinstance(a, Stack):
        return f"S({show_type(a.elem)})"
    if isinstance(a, Tree):
        return f"T({show_type(a.elem)})"
    if isinstance(a, Arrow):
        s, p = f"{show_type(a.arg, 1)} -o {show_type(a.res, 0)}", 0
    elif isinstance(a, Sum):
        s, p = f"{show_type(a.left, 2)} + {show_type(a.right, 1)}", 1
    elif isinstance(a, (Tensor, Prod)):
        op = "*" if isinstance(a, Tensor) else "&"
        s, p = f"{show_type(a.left, 3)} {op} {show_type(a.right, 2)}", 2
    else:
        raise TypeError(f"not a type: {a!r}")
    return f"({s})" if prec > p else s


def _branch(t: Term) -> str:
    # a binder form in a non-final branch would swallow the next branch
    return show_term(t, 1)


def _tuple_items(t: Term) -> list[Term]:
    items = []
    while isinstance(t, Pair):
        items.append(t.left)
        t = t.right
    return items + [t]


def show_term(t: Term, prec: int = 0) -> str:
    """Render a term; prec 0 = binder forms allowed, 1 = application, 2 = atom."""
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Null):
        return "<>"
    if isinstance(t, Nil):
        return "nil"
    if isinstance(t, Empty):
        return "empty"
    if isinstance(t, Leaf):
        return "leaf"
    if isinstance(t, Pair):
        return "(" + ", ".join(show_term(x) for x in _tuple_items(t)) + ")"
    if isinstance(t, Record):
        return f"{{{show_term(t.left)}, {show_term(t.right)}}}"
    if isinstance(t, Cons):
        return f"cons ({show_term(t.diamond)}, {show_term(t.head)}, {show_term(t.tail)})"
    if isinstance(t, Push):
        return f"push ({show_term(t.head)}, {show_term(t.tail)})"
    if isinstance(t, Node):
        parts = ", ".join(show_term(x) for x in (t.diamond, t.label, t.left, t.right))
        return f"node ({parts})"
    if isinstance(t, Annot):
        return f"({show_term(t.body)} : {show_type(t.type)})"
    if isinstance(t, (Inj, Proj)):
        kw = "inj" if isinstance(t, Inj) else "proj"
        s, p = f"{kw}{t.index} {show_term(t.body, 2)}", 1
    elif isinstance(t, App):
        s, p = f"{show_term(t.fn, 1)} {show_term(t.arg, 2)}", 1
    elif isinstance(t, Lam):
        s, p = f"lam {t.var} . {show_term(t.body)}", 0
    elif isinstance(t, LetPair):
        s = f"letp ({t.left_var}, {t.right_var}) = {show_term(t.scrut)} in {show_term(t.body)}"
        p = 0
    elif isinstance(t, Case):
        s = (f"case {show_term(t.scrut, 1)} | inj1 {t.left_var} => {_branch(t.left)}"
             f" | inj2 {t.right_var} => {show_term(t.right)}")
        p = 0
    elif isinstance(t, Rec):
        s = (f"rec {show_term(t.scrut, 1)} | nil => {_branch(t.nil_case)}"
             f" | cons ({t.d_var}, {t.h_var}, {t.t_var}) => {show_term(t.cons_case)}")
        p = 0
    elif isinstance(t, Pop):
        s = (f"pop {show_term(t.scrut, 1)} | empty => {_branch(t.empty_case)}"
             f" | push ({t.h_var}, {t.t_var}) => {show_term(t.push_case)}")
        p = 0
    elif isinstance(t, TRec):
        s = (f"trec {show_term(t.scrut, 1)} | leaf => {_branch(t.leaf_case)}"
             f" | node ({t.d_var}, {t.x_var}, {t.l_var}, {t.r_var}) => {show_term(t.node_case)}")
        p = 0
    else:
        raise TypeError(f"not a term: {t!r}")
    return f"({s})" if prec > p else s


# ---------------------------------------------------------------- lexing


class LfplSyntaxError(Exception):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"{line}:{col}: syntax error: {msg}")
        self.msg = msg
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Tok:
    kind: str  # "id", "kw", "sym", "eof"
    text: str
    line: int
    col: int


KEYWORDS = {
    "lam", "rec", "case", "letp", "in", "nil", "cons", "inj1", "inj2",
    "proj1", "proj2", "empty", "push", "pop", "leaf", "node", "trec", "diam",
}
_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<comment>--[^\n]*)"
    r"|(?P<sym>-o|=>|<>|[()\[\]{},.:|=*+&])"
    r"|(?P<id>[A-Za-z_][A-Za-z0-9_']*|[0-9]+)"
    r"|(?P<diam>◆)"
)


def tokenize(text: str) -> list[Tok]:
    toks: list[Tok] = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise LfplSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        s = m.group()
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind == "sym":
            toks.append(Tok("sym", s, line, col))
        elif kind == "diam":
            toks.append(Tok("kw", "diam", line, col))
        elif kind == "id":
            toks.append(Tok("kw" if s in KEYWORDS else "id", s, line, col))
        pos = m.end()
    toks.append(Tok("eof", "", line, pos - line_start + 1))
    return toks


# ---------------------------------------------------------------- parsing


class Parser:
    """Recursive-descent parser over a token list.

    ``stop_at_col0`` makes ``name :`` or ``name =`` starting in column 1
    terminate the current term; this delimits definitions in ``.lfpl`` files.
    """

    def __init__(self, toks: list[Tok], stop_at_col0: bool = False):
        self.toks = toks
        self.i = 0
        self.stop_at_col0 = stop_at_col0
        taken = {t.text for t in toks if t.kind == "id"}
        self._taken = taken
        self._fresh = 0
        self.positions: dict[int, tuple[int, int]] = {}

    # -- helpers
    @property
    def tok(self) -> Tok:
        return self.toks[self.i]

    def at_boundary(self) -> bool:
        t = self.tok
        if t.kind == "eof":
            return True
        if not self.stop_at_col0 or t.col != 1 or t.kind != "id":
            return False
        nxt = self.toks[self.i + 1]
        return nxt.kind == "sym" and nxt.text in (":", "=")

    def peek(self, text: str) -> bool:
        t = self.tok
        return not self.at_boundary() and t.kind in ("sym", "kw") and t.text == text

    def accept(self, text: str) -> bool:
        if self.peek(text):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Tok:
        if not self.peek(text):
            self.fail(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        t = self.tok
        self.i += 1
        return t

    def fail(self, msg: str):
        t = self.tok
        raise LfplSyntaxError(msg, t.line, t.col)

    def ident(self) -> str:
        t = self.tok
        if self.at_boundary() or t.kind != "id" or t.text[0].isdigit():
            self.fail(f"expected identifier, found {t.text or 'end of input'!r}")
        self.i += 1
        return t.text

    def fresh(self) -> str:
        while True:
            self._fresh += 1
            name = f"p{self._fresh}_"
            if name not in self._taken:
                self._taken.add(name)
                return name

    # -- types
    def type(self) -> Type:
        left = self.type_sum()
        if self.accept("-o"):
            return Arrow(left, self.type())
        return left

    def type_sum(self) -> Type:
        left = self.type_tensor()
        if self.accept("+"):
            return Sum(left, self.type_sum())
        return left

    def type_tensor(self) -> Type:
        left = self.type_atom()
        if self.accept("*"):
            return Tensor(left, self.type_tensor())
        if self.accept("&"):
            return Prod(left, self.type_tensor())
        return left

    def type_atom(self) -> Type:
        t = self.tok
        if self.accept("diam"):
            return DIAMOND
        if self.accept("("):
            a = self.type()
            self.expect(")")
            return a
        if not self.at_boundary() and t.kind == "id":
            ctor = {"L": List, "S": Stack, "T": Tree}.get(t.text)
            if t.text == "1":
                self.i += 1
                return UNIT
            if ctor is not None:
                self.i += 1
                self.expect("(")
                a = self.type()
                self.expect(")")
                return ctor(a)
        self.fail(f"expected a type, found {t.text or 'end of input'!r}")

    # -- patterns
    def pattern(self):
        """Either a name or a nested tuple of patterns."""
        if self.accept("("):
            items = [self.pattern()]
            while self.accept(","):
                items.append(self.pattern())
            self.expect(")")
            if len(items) == 1:
                return items[0]
            return tuple(items)
        return self.ident()

    def bind(self, pat) -> tuple[str, "callable"]:
        """Return a binder name and a wrapper that desugars a tuple pattern."""
        if isinstance(pat, str):
            return pat, lambda body: body
        name = self.fresh()
        return name, lambda body: self.destructure(name, pat, body)

    def destructure(self, name: str, pat: tuple, body: Term) -> Term:
        first, rest = pat[0], pat[1:]
        rest_pat = rest[0] if len(rest) == 1 else rest
        x, wrap_x = self.bind(first)
        y, wrap_y = self.bind(rest_pat)
        return LetPair(Var(name), x, y, wrap_x(wrap_y(body)))

    # -- terms
    def term(self) -> Term:
        t = self.tok
        m = self._term()
        self.positions.setdefault(id(m), (t.line, t.col))
        return m

    def atom(self) -> Term:
        t = self.tok
        m = self._atom()
        self.positions.setdefault(id(m), (t.line, t.col))
        return m

    def _term(self) -> Term:
        if self.accept("lam"):
            x, wrap = self.bind(self.pattern())
            self.expect(".")
            return Lam(x, wrap(self.term()))
        if self.accept("letp"):
            pat = self.pattern()
            if not isinstance(pat, tuple):
                self.fail("letp needs a tuple pattern")
            self.expect("=")
            scrut = self.term()
            self.expect("in")
            body = self.term()
            first, rest = pat[0], pat[1:]
            rest_pat = rest[0] if len(rest) == 1 else rest
            x, wrap_x = self.bind(first)
            y, wrap_y = self.bind(rest_pat)
            return LetPair(scrut, x, y, wrap_x(wrap_y(body)))
        if self.accept("case"):
            scrut = self.term()
            self.accept(".")
            self.expect("|")
            self.expect("inj1")
            x1, w1 = self.bind(self.pattern())
            self.expect("=>")
            n1 = w1(self.term())
            self.expect("|")
            self.expect("inj2")
            x2, w2 = self.bind(self.pattern())
            self.expect("=>")
            n2 = w2(self.term())
            return Case(scrut, x1, n1, x2, n2)
        if self.accept("rec"):
            scrut = self.term()
            self.accept(".")
            self.expect("|")
            self.expect("nil")
            self.expect("=>")
            n1 = self.term()
            self.expect("|")
            self.expect("cons")
            self.expect("(")
            d = self.ident()
            self.expect(",")
            h, wh = self.bind(self.pattern())
            self.expect(",")
            tl, wt = self.bind(self.pattern())
            self.expect(")")
            self.expect("=>")
            return Rec(scrut, n1, d, h, tl, wh(wt(self.term())))
        if self.accept("pop"):
            scrut = self.term()
            self.accept(".")
            self.expect("|")
            self.expect("empty")
            self.expect("=>")
            n1 = self.term()
            self.expect("|")
            self.expect("push")
            self.expect("(")
            h, wh = self.bind(self.pattern())
            self.expect(",")
            tl = self.ident()
            self.expect(")")
            self.expect("=>")
            return Pop(scrut, n1, h, tl, wh(self.term()))
        if self.accept("trec"):
            scrut = self.term()
            self.accept(".")
            self.expect("|")
            self.expect("leaf")
            self.expect("=>")
            n1 = self.term()
            self.expect("|")
            self.expect("node")
            self.expect("(")
            d = self.ident()
            self.expect(",")
            x, wx = self.bind(self.pattern())
            self.expect(",")
            l = self.ident()
            self.expect(",")
            r = self.ident()
            self.expect(")")
            self.expect("=>")
            return TRec(scrut, n1, d, x, l, r, wx(self.term()))
        return self.app()

    def starts_atom(self) -> bool:
        t = self.tok
        if self.at_boundary():
            return False
        if t.kind == "id":
            return not t.text[0].isdigit()
        if t.kind == "kw":
            return t.text in ("nil", "empty", "leaf", "cons", "push", "node",
                              "inj1", "inj2", "proj1", "proj2")
        return t.text in ("(", "{", "<>")

    def app(self) -> Term:
        fn = self.atom()
        while self.starts_atom():
            fn = App(fn, self.atom())
        return fn

    def args(self, n: int) -> list[Term]:
        self.expect("(")
        out = [self.term()]
        for _ in range(n - 1):
            self.expect(",")
            out.append(self.term())
        self.expect(")")
        return out

    def _atom(self) -> Term:
        t = self.tok
        if self.at_boundary():
            self.fail("unexpected end of term")
        if t.kind == "id" and not t.text[0].isdigit():
            if t.text == WILDCARD:
                self.fail("'_' cannot be used as a variable")
            self.i += 1
            return Var(t.text)
        for kw, ctor in (("<>", Null), ("nil", Nil), ("empty", Empty), ("leaf", Leaf)):
            if self.accept(kw):
                return ctor()
        if self.accept("cons"):
            return Cons(*self.args(3))
        if self.accept("push"):
            return Push(*self.args(2))
        if self.accept("node"):
            return Node(*self.args(4))
        for kw, ctor, i in (("inj1", Inj, 1), ("inj2", Inj, 2),
                            ("proj1", Proj, 1), ("proj2", Proj, 2)):
            if self.accept(kw):
                return ctor(i, self.atom())
        if self.accept("{"):
            a = self.term()
            self.expect(",")
            b = self.term()
            self.expect("}")
            return Record(a, b)
        if self.accept("("):
            first = self.term()
            if self.accept(":"):
                a = self.type()
                self.expect(")")
                return Annot(first, a)
            items = [first]
            while self.accept(","):
                items.append(self.term())
            self.expect(")")
            out = items[-1]
            for x in reversed(items[:-1]):
                out = Pair(x, out)
            return out
        self.fail(f"unexpected {t.text!r}")

    def done(self):
        if self.tok.kind != "eof":
            self.fail(f"unexpected trailing {self.tok.text!r}")


def parse_type(text: str) -> Type:
    p = Parser(tokenize(text))
    a = p.type()
    p.done()
    return a


def parse_term(text: str) -> Term:
    p = Parser(tokenize(text))
    m = p.term()
    p.done()
    return m


# ---------------------------------------------------------------- programs


@dataclass
class Definition:
    name: str
    type: Type | None
    term: Term | None
    line: int = 0


@dataclass
class Program:
    """Ordered top-level definitions of an ``.lfpl`` file.

    ``terms`` holds each definition with earlier definitions already
    inlined as ascribed terms, so every entry is self-contained.
    """

    defs: dict[str, Definition] = field(default_factory=dict)
    positions: dict[int, tuple[int, int]] = field(default_factory=dict, repr=False)

    def term(self, name: str) -> Term:
        return self.defs[name].term

    def type(self, name: str) -> Type:
        return self.defs[name].type


def inline(t: Term, env: dict[str, Term], bound: frozenset[str] = frozenset(),
           positions: dict[int, tuple[int, int]] | None = None) -> Term:
    """Replace free references to global names by their (ascribed) bodies."""
    if isinstance(t, Var):
        if t.name not in bound and t.name in env:
            return env[t.name]
        return t
    bnd = binders(t)
    updates = {}
    for name, sub in children(t):
        inner = bound | set(bnd.get(name, ()))
        new = inline(sub, env, frozenset(inner), positions)
        if new is not sub:
            updates[name] = new
    if not updates:
        return t
    kwargs = {f: getattr(t, f) for f in t.__dataclass_fields__}
    kwargs.update(updates)
    out = type(t)(**kwargs)
    if positions is not None and id(t) in positions:
        positions[id(out)] = positions[id(t)]
    return out


def parse_program(text: str) -> Program:
    toks = tokenize(text)
    p = Parser(toks, stop_at_col0=True)
    prog = Program(positions=p.positions)
    globals_: dict[str, Term] = {}
    while p.tok.kind != "eof":
        start = p.tok
        if start.col != 1:
            p.fail("top-level definitions must start in column 1")
        if start.kind != "id" or not p.at_boundary():
            raise LfplSyntaxError(f"expected a definition name, found {start.text!r}",
                                  start.line, start.col)
        p.i += 1
        name = start.text
        d = prog.defs.setdefault(name, Definition(name, None, None, start.line))
        if p.accept(":"):
            if d.type is not None:
                raise LfplSyntaxError(f"duplicate type for {name}", start.line, start.col)
            d.type = p.type()
            if d.term is not None:
                globals_[name] = Annot(d.term, d.type)
        elif p.accept("="):
            if d.term is not None:
                raise LfplSyntaxError(f"duplicate definition of {name}", start.line, start.col)
            d.term = inline(p.term(), globals_, positions=p.positions)
            if d.type is not None:
                globals_[name] = Annot(d.term, d.type)
        else:
            p.fail("expected ':' or '=' after definition name")
        if not p.at_boundary():
            p.fail(f"unexpected {p.tok.text!r}")
    for d in prog.defs.values():
        if d.term is None:
            raise LfplSyntaxError(f"{d.name} has a type but no definition", d.line, 1)
        if d.type is None:
            raise LfplSyntaxError(f"{d.name} needs a type signature before its use", d.line, 1)
    return prog

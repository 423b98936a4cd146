"""Iterating a step function a polynomial number of times."""

from __future__ import annotations

from ..costpoly import CostPoly
from ..syntax import Arrow, Sum, Tensor, Type, UNIT, UNIT_LIST, show_type
from .build import Closed, arrow, lfpl, ty


def _step_type(a: Type) -> Type:
    s = Tensor(a, UNIT_LIST)
    return Arrow(s, s)


def _state_of(f: Closed) -> Type:
    t = f.type
    if not (isinstance(t, Arrow) and t.arg == t.res and isinstance(t.arg, Tensor)
            and t.arg.right == UNIT_LIST):
        raise TypeError(f"step function must have type A * L(1) -o A * L(1), got {show_type(t)}")
    return t.arg.left


def iter_sharp(f: Closed) -> Closed:
    """``f#(x, n) = f^|n| (x, n)``, lending the diamonds of ``n`` to the recursor."""
    a = _state_of(f)
    g = lfpl("iter_g", """
        lam m . rec m
        | nil => lam s . s
        | cons (d, u, r) => lam (x, n) . f (r (x, cons (d, u, n)))""",
        arrow(UNIT_LIST, _step_type(a)), f=f)
    return lfpl(f"{f.name}_sharp", "lam s . letp (x, n) = s in g n (x, nil)",
                _step_type(a), g=g)


def identity_step(a: Type) -> Closed:
    return lfpl("id_step", "lam s . s", _step_type(a))


def compose(fs: list[Closed], a: Type) -> Closed:
    """Right-to-left composition of step functions (identity when empty)."""
    if not fs:
        return identity_step(a)
    body = "s"
    refs = {}
    for i, f in enumerate(reversed(fs)):
        refs[f"f{i}"] = f
        body = f"f{i} ({body})"
    return lfpl("compose", f"lam s . {body}", _step_type(a), **refs)


def iter_poly(f: Closed, p) -> Closed:
    """``f^P(|n|)``: each monomial ``c n^j`` is ``c`` copies of the j-fold sharp."""
    p = CostPoly(p)
    a = _state_of(f)
    parts: list[Closed] = []
    power = f
    for j, c in enumerate(p):
        if j > 0:
            power = iter_sharp(power)
        parts.extend([power] * c)
    out = compose(parts, a)
    out.name = f"{f.name}_P"
    return out


# ---------------------------------------------------------------- counting


def counter_type(width: int) -> Type:
    """Little-endian binary counter of ``width`` bits, each bit ``1 + 1``."""
    bit = Sum(UNIT, UNIT)
    out: Type = bit
    for _ in range(width - 1):
        out = Tensor(bit, out)
    return out


def counter_inc(width: int) -> Closed:
    """Increment modulo ``2^width``."""
    t = counter_type(width)
    if width == 1:
        return lfpl("inc1", "lam b . case b | inj1 _ => inj2 <> | inj2 _ => inj1 <>", Arrow(t, t))
    inner = counter_inc(width - 1)
    return lfpl(f"inc{width}", """
        lam c . letp (b, rest) = c in case b
        | inj1 _ => (inj2 <>, rest)
        | inj2 _ => (inj1 <>, inc rest)""", Arrow(t, t), inc=inner)


def counting_step(width: int) -> Closed:
    """Step function bumping the counter and leaving the unit list untouched."""
    t = counter_type(width)
    return lfpl("count", "lam s . letp (x, n) = s in (inc x, n)", _step_type(t),
                inc=counter_inc(width))


def counter_den(width: int, value: int):
    from ..evalden import InjD, PairD, STAR
    bits = [InjD(2 if (value >> i) & 1 else 1, STAR) for i in range(width)]
    out = bits[-1]
    for b in reversed(bits[:-1]):
        out = PairD(b, out)
    return out


def counter_value(d, width: int) -> int:
    total = 0
    for i in range(width):
        b = d.left if i < width - 1 else d
        total |= (b.index - 1) << i
        if i < width - 1:
            d = d.right
    return total

"""Write the machine-built programs (divmod, iterators, stacks) into corpus/gen."""

import sys
from pathlib import Path

from lfpl.complete import divmod_term, iter_poly, iter_sharp, counting_step, stack_const, stack_poly
from lfpl.complete.stdlib import stdlib
from lfpl.costpoly import CostPoly
from lfpl.syntax import Sum, UNIT

BOOL = Sum(UNIT, UNIT)


def programs():
    yield "divmod", [divmod_term(k) for k in range(3)]
    yield "iterators", [iter_sharp(counting_step(3)), iter_poly(counting_step(3), CostPoly([1, 0, 1]))]
    const2 = stack_const(BOOL, 2)
    yield "stack_const", [const2.empty, const2.push, const2.pop]
    lin = stack_poly(UNIT, CostPoly([1, 1]))
    yield "stack_linear", [lin.empty, lin.push, lin.pop]
    yield "stdlib_bool", list(stdlib(BOOL).values())


def main(out_dir: str = "corpus/gen") -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for stem, defs in programs():
        names = set()
        chunks = [f"-- generated by scripts/export_corpus.py\n"]
        for c in defs:
            name = c.name
            while name in names:
                name += "'"
            names.add(name)
            chunks.append(c.source(name))
        (out / f"{stem}.lfpl").write_text("\n".join(chunks))
        print(f"wrote {out / stem}.lfpl ({len(defs)} definitions)")


if __name__ == "__main__":
    sys.setrecursionlimit(100_000)
    main(*sys.argv[1:])

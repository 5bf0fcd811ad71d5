"""Canonical text form of a model document."""

from __future__ import annotations

from .ast import (
    CompositionBlock,
    InversionBlock,
    ModelDocument,
    ObserverBlock,
    PropertyDecl,
    RelationBlock,
    SystemBlock,
    TestDecl,
)

INDENT = "  "


def _test(t: TestDecl, depth: int) -> list[str]:
    pad = INDENT * depth
    lines = [f"{pad}test {t.id} {{"]
    lines += [f"{pad}{INDENT}{s} -> {o.text};" for s, o in sorted(t.outcomes)]
    lines.append(f"{pad}}}")
    return lines


def _property(p: PropertyDecl, depth: int) -> list[str]:
    pad = INDENT * depth
    return [f"{pad}property {p.id} {{", f"{pad}{INDENT}tests {' '.join(sorted(p.tests))};", f"{pad}}}"]


def _space(b: SystemBlock | ObserverBlock) -> list[str]:
    kw = "observer" if isinstance(b, ObserverBlock) else "system"
    lines = [f"{kw} {b.id} {{", f"{INDENT}states {' '.join(sorted(b.states))};"]
    if isinstance(b, ObserverBlock):
        lines.append(f"{INDENT}indicator {b.indicator};")
    for t in sorted(b.tests, key=lambda t: t.id):
        lines += _test(t, 1)
    for p in sorted(b.properties, key=lambda p: p.id):
        lines += _property(p, 1)
    lines.append("}")
    return lines


def _relation(r: RelationBlock) -> list[str]:
    lines = [f"relation {r.id} ({r.observed}, {r.observer}) {{"]
    lines += [f"{INDENT}({s}, {m}) = {o.text};" for (s, m), o in sorted(r.entries)]
    lines.append("}")
    return lines


def _inversion(inv: InversionBlock) -> list[str]:
    lines = [f"inversion {inv.id} on {inv.observer} {{"]
    lines += [f"{INDENT}{m} -> {img};" for m, img in sorted(inv.mapping)]
    lines.append("}")
    return lines


def _composition(c: CompositionBlock) -> list[str]:
    lines = [f"composition {c.id} {{", f"{INDENT}compound {' '.join(sorted(c.compound))};",
             f"{INDENT}tau {{"]
    lines += [f"{INDENT * 2}({s}, {m}) -> {k};" for (s, m), k in sorted(c.tau)]
    lines += [f"{INDENT}}}", f"{INDENT}rho {{"]
    lines += [f"{INDENT * 2}{k} -> {m};" for k, m in sorted(c.rho)]
    lines += [f"{INDENT}}}", f"{INDENT}phi {{"]
    lines += [f"{INDENT * 2}{m} -> {o.text};" for m, o in sorted(c.phi)]
    lines += [f"{INDENT}}}", "}"]
    return lines


def serialize(doc: ModelDocument) -> str:
    """Blocks in fixed kind order, ids sorted, one table entry per line."""
    chunks: list[list[str]] = []
    chunks += [_space(b) for b in sorted(doc.systems, key=lambda b: b.id)]
    chunks += [_space(b) for b in sorted(doc.observers, key=lambda b: b.id)]
    chunks += [_relation(b) for b in sorted(doc.relations, key=lambda b: b.id)]
    chunks += [_inversion(b) for b in sorted(doc.inversions, key=lambda b: b.id)]
    chunks += [_composition(b) for b in sorted(doc.compositions, key=lambda b: b.id)]
    return "\n\n".join("\n".join(c) for c in chunks) + "\n"

"""Columned dependency diagram and the two-group takeout decomposition.

The diagram places the primary-key attributes in column 0 and every other
attribute one column to the right of its furthest determinant.  Transitive
right sides and dependencies determined by alternative keys are not drawn.

Takeout group 1 extracts, column by column from the right, every FD edge
whose dependent lies outside the primary key and whose determinant is not a
superkey; the determinant becomes the new table's primary key and the
dependents are crossed off the diagram.  Group 2 then splits the residual
(uncrossed) attributes along the dependencies internal to it.  Tables sharing
a primary key are merged, and foreign keys are attached wherever a table
embeds another table's full primary key.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .model import (
    Attribute,
    AttributeSet,
    Decomposition,
    FunctionalDependency,
    MultivaluedDependency,
    RelationSchema,
    SchemaError,
    designate_foreign_keys,
)
from .inference import (
    is_superkey,
    primary_key,
    suppress_alternative_key_fds,
    transitive_right_reduce,
)


class UnreachableAttributeError(SchemaError):
    """An attribute is neither in the key nor the dependent of any edge."""


class CyclicDependencyError(SchemaError):
    """Column assignment diverged: the reduced edges contain a cycle."""


FD_EDGE = "fd"
MVD_EDGE = "mvd"


@dataclass(frozen=True)
class DiagramEdge:
    determinant: AttributeSet
    dependent: Attribute
    kind: str
    origin_index: int = field(compare=False, default=0)


@dataclass(frozen=True)
class TakeoutStep:
    dependency: str
    table: str
    crossed: AttributeSet
    group: int

    def render(self) -> str:
        crossed = f"; crossed: {self.crossed.render()}" if self.crossed else ""
        return f"take out {self.dependency} into {self.table} (group {self.group}{crossed})"


@dataclass
class DependencyDiagram:
    """Columns of attributes, edges between them, and crossed-out marks.

    ``crossed`` mutates only inside takeout_normalize, which records each
    change as a TakeoutStep.
    """

    columns: List[List[Attribute]]
    edges: List[DiagramEdge]
    crossed: set = field(default_factory=set)
    steps: List[TakeoutStep] = field(default_factory=list)

    def column_of(self, attr: Attribute) -> int:
        for index, col in enumerate(self.columns):
            if attr in col:
                return index
        raise KeyError(attr)


def build_diagram(schema: RelationSchema) -> DependencyDiagram:
    """Lay the schema out in determinant-rank columns.

    Edges come from the right-reduced, alternative-key-suppressed FDs plus
    all MVDs.  Every attribute outside the primary key must be the dependent
    of at least one edge.
    """
    key = primary_key(schema)
    reduced = suppress_alternative_key_fds(transitive_right_reduce(schema.fds), schema)
    edges: List[DiagramEdge] = []
    for fd in reduced:
        for attr in fd.rhs:
            edges.append(DiagramEdge(fd.lhs, attr, FD_EDGE, fd.origin_index))
    for mvd in schema.mvds:
        for attr in mvd.rhs:
            edges.append(DiagramEdge(mvd.lhs, attr, MVD_EDGE, mvd.origin_index))
    edges.sort(key=lambda e: (e.origin_index, e.dependent.ordinal))

    targeted = {e.dependent for e in edges}
    for attr in schema.attributes:
        if attr not in key and attr not in targeted:
            raise UnreachableAttributeError(
                f"attribute {attr.name!r} is outside the key and no dependency targets it"
            )

    col: Dict[Attribute, int] = {}
    for attr in schema.attributes:
        col[attr] = 0 if attr in key else 1
    limit = len(schema.attributes)
    changed = True
    while changed:
        changed = False
        for edge in edges:
            if edge.dependent in key:
                continue
            want = 1 + max(col[d] for d in edge.determinant)
            if want > col[edge.dependent]:
                if want > limit:
                    raise CyclicDependencyError(
                        f"cannot place attribute {edge.dependent.name!r}: "
                        "the reduced dependencies form a cycle"
                    )
                col[edge.dependent] = want
                changed = True

    width = max(col.values()) + 1
    columns: List[List[Attribute]] = [[] for _ in range(width)]
    for attr in schema.attributes:
        columns[col[attr]].append(attr)
    return DependencyDiagram(columns=columns, edges=edges)


def _junction_name(determinant: AttributeSet) -> str:
    return "junction_" + "_".join(determinant.names)


def emit_dot(diagram: DependencyDiagram) -> str:
    """Render the diagram as deterministic graphviz DOT text.

    Nodes appear in ordinal order, edges in declaration order.  Crossed
    attributes carry a strikethrough label.  Multi-attribute determinants
    route through a point-shaped junction node; MVD edges use a doubled
    shaft with a vee arrowhead.
    """
    lines = ["digraph dependency_diagram {", "  rankdir=LR;", "  node [shape=box];"]
    everything = sorted(
        (a for column in diagram.columns for a in column), key=lambda a: a.ordinal
    )
    for attr in everything:
        if attr in diagram.crossed:
            lines.append(f"  {attr.name} [label=<<s>{attr.name}</s>>];")
    for column in diagram.columns:
        names = sorted(column, key=lambda a: a.ordinal)
        body = " ".join(f"{a.name};" for a in names)
        lines.append("  { rank=same; " + body + " }")
    mvd_style = ' [arrowhead=vee, color="black:black"]'
    junctions_emitted = set()
    for edge in diagram.edges:
        style = mvd_style if edge.kind == MVD_EDGE else ""
        if len(edge.determinant) == 1:
            (det,) = tuple(edge.determinant)
            lines.append(f"  {det.name} -> {edge.dependent.name}{style};")
        else:
            junction = _junction_name(edge.determinant)
            if junction not in junctions_emitted:
                junctions_emitted.add(junction)
                lines.append(f"  {junction} [shape=point];")
                for det in edge.determinant:
                    lines.append(f"  {det.name} -> {junction} [dir=none];")
            lines.append(f"  {junction} -> {edge.dependent.name}{style};")
    lines.append("}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class _PendingTable:
    name: str
    attributes: AttributeSet
    pk: AttributeSet
    provenance: str


def _group1_units(
    diagram: DependencyDiagram, schema: RelationSchema, key: AttributeSet
) -> List[Tuple[AttributeSet, List[Attribute], int]]:
    """Group-1 takeout units: (determinant, dependents, column).

    One unit per reduced FD whose edges point at non-key attributes; the
    determinant must not be a superkey (such dependencies violate nothing and
    stay in the residual table).  Two declared FDs with the same determinant
    stay separate units here; the merge step folds their tables together
    afterwards.  Units are ordered right-to-left by dependent column, then by
    determinant ordinals, then by declaration.
    """
    units: Dict[int, Tuple[AttributeSet, List[Attribute]]] = {}
    for edge in diagram.edges:
        if edge.kind != FD_EDGE or edge.dependent in key:
            continue
        if is_superkey(edge.determinant, schema):
            continue
        entry = units.setdefault(edge.origin_index, (edge.determinant, []))
        if edge.dependent not in entry[1]:
            entry[1].append(edge.dependent)
    out = []
    for origin, (det, deps) in units.items():
        column = diagram.column_of(deps[0])
        out.append((det, sorted(deps, key=lambda a: a.ordinal), column, origin))
    out.sort(key=lambda unit: (-unit[2], unit[0].ordinals, unit[3]))
    return [(det, deps, column) for det, deps, column, _ in out]


def takeout_normalize(
    schema: RelationSchema, group1_order: Optional[Sequence[int]] = None
) -> Tuple[Decomposition, DependencyDiagram]:
    """Run the full takeout decomposition; returns the tables and the
    diagram with its crossing marks.

    ``group1_order`` permutes the group-1 takeouts (testing hook for the
    order-invariance property); it must be a permutation of range(n_units).
    """
    diagram = build_diagram(schema)
    key = primary_key(schema)
    log: List[str] = []
    pending: List[_PendingTable] = []
    counter = 0

    units = _group1_units(diagram, schema, key)
    if group1_order is not None:
        if sorted(group1_order) != list(range(len(units))):
            raise ValueError("group1_order must permute the group-1 units")
        units = [units[i] for i in group1_order]
    for det, deps, _column in units:
        counter += 1
        name = f"T{counter}"
        dep_set = AttributeSet.of(deps)
        newly = AttributeSet.of(d for d in deps if d not in diagram.crossed)
        diagram.crossed.update(deps)
        dependency_text = f"{det.render()} -> {dep_set.render()}"
        step = TakeoutStep(dependency_text, name, newly, group=1)
        diagram.steps.append(step)
        log.append(step.render())
        pending.append(_PendingTable(name, det | dep_set, det, dependency_text))

    residual = AttributeSet.of(
        a for a in schema.attributes if a not in diagram.crossed
    )
    for dep in schema.dependencies():
        sides = dep.lhs | dep.rhs
        if not sides.issubset(residual):
            continue
        if is_superkey(dep.lhs, schema):
            continue
        if sides == residual:
            # trivial on what remains: no split, the residual stays whole
            continue
        is_fd = isinstance(dep, FunctionalDependency)
        part = dep.lhs | dep.rhs
        pk = dep.lhs if is_fd else part
        residual = residual - dep.rhs
        diagram.crossed.update(dep.rhs.members)
        if any(existing.attributes == part for existing in pending):
            log.append(f"split along {dep.render()} repeats an existing table; skipped")
            continue
        counter += 1
        name = f"T{counter}"
        step = TakeoutStep(dep.render(), name, dep.rhs, group=2)
        diagram.steps.append(step)
        log.append(step.render())
        pending.append(_PendingTable(name, part, pk, dep.render()))

    if residual:
        residual_pk = key if key.issubset(residual) else residual
        pending.append(_PendingTable(schema.name, residual, residual_pk, "residual"))
        log.append(f"residual table {schema.name} ({residual.render()})")

    merged: List[_PendingTable] = []
    by_pk: Dict[frozenset, int] = {}
    for table in pending:
        slot = by_pk.get(table.pk.members)
        if slot is None:
            by_pk[table.pk.members] = len(merged)
            merged.append(table)
        else:
            keep = merged[slot]
            merged[slot] = _PendingTable(
                keep.name, keep.attributes | table.attributes, keep.pk, "merged"
            )
            log.append(f"merge {table.name} into {keep.name} (same primary key)")

    tables = designate_foreign_keys(
        [(t.name, t.attributes, t.pk, t.provenance) for t in merged]
    )
    return Decomposition(tables=tables, log=tuple(log)), diagram

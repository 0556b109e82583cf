"""Immutable data model: attributes, dependencies, schemas, and decompositions.

All values are frozen after construction and safe to share between threads.
Attribute sets render in declaration (ordinal) order everywhere, so printed
output is stable and diffable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence, Tuple, Union


class SchemaError(Exception):
    """Base class for schema construction and analysis errors."""


class EmptyRHSError(SchemaError):
    """A dependency has no right side left once the left side is stripped."""


class UndeclaredAttributeError(SchemaError):
    """A dependency or key references an attribute the schema never declares."""


class DuplicateAttributeError(SchemaError):
    """The same attribute name is declared more than once."""


@dataclass(frozen=True)
class Attribute:
    """A named column with its 0-based declaration position."""

    name: str
    ordinal: int

    def __repr__(self) -> str:
        return f"Attribute({self.name!r}, {self.ordinal})"


@dataclass(frozen=True)
class AttributeSet:
    """A set of attributes that iterates and renders in ordinal order."""

    members: frozenset[Attribute] = frozenset()

    @classmethod
    def of(cls, attrs: Iterable[Attribute]) -> "AttributeSet":
        return cls(frozenset(attrs))

    def __iter__(self) -> Iterator[Attribute]:
        return iter(sorted(self.members, key=lambda a: a.ordinal))

    def __len__(self) -> int:
        return len(self.members)

    def __bool__(self) -> bool:
        return bool(self.members)

    def __contains__(self, attr: Attribute) -> bool:
        return attr in self.members

    def __or__(self, other: "AttributeSet") -> "AttributeSet":
        return AttributeSet(self.members | other.members)

    def __and__(self, other: "AttributeSet") -> "AttributeSet":
        return AttributeSet(self.members & other.members)

    def __sub__(self, other: "AttributeSet") -> "AttributeSet":
        return AttributeSet(self.members - other.members)

    def issubset(self, other: "AttributeSet") -> bool:
        return self.members <= other.members

    def ispropersubset(self, other: "AttributeSet") -> bool:
        return self.members < other.members

    def isdisjoint(self, other: "AttributeSet") -> bool:
        return self.members.isdisjoint(other.members)

    def without(self, attr: Attribute) -> "AttributeSet":
        return AttributeSet(self.members - {attr})

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(a.name for a in self)

    @property
    def ordinals(self) -> Tuple[int, ...]:
        return tuple(sorted(a.ordinal for a in self.members))

    def render(self) -> str:
        return ", ".join(self.names)

    def __repr__(self) -> str:
        return f"{{{self.render()}}}"


def _strip_dependency(kind: str, lhs: AttributeSet, rhs: AttributeSet) -> AttributeSet:
    if not lhs:
        raise SchemaError(f"{kind} needs a nonempty determinant")
    if not rhs:
        raise EmptyRHSError(f"{kind} needs a nonempty dependent side")
    stripped = rhs - lhs
    if not stripped:
        raise EmptyRHSError(
            f"{kind} {lhs.render()} -> {rhs.render()} is trivial: "
            "every dependent attribute already occurs on the left side"
        )
    return stripped


@dataclass(frozen=True)
class FunctionalDependency:
    """X -> Y.  Construction strips X from Y; a fully trivial FD is an error."""

    lhs: AttributeSet
    rhs: AttributeSet
    origin_index: int = field(default=0, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "rhs", _strip_dependency("fd", self.lhs, self.rhs))

    def render(self) -> str:
        return f"{self.lhs.render()} -> {self.rhs.render()}"

    def display(self) -> str:
        return f"{self.lhs.render()} → {self.rhs.render()}"

    def __repr__(self) -> str:
        return f"fd({self.render()})"


@dataclass(frozen=True)
class MultivaluedDependency:
    """X ->> Y, same construction rules as a functional dependency."""

    lhs: AttributeSet
    rhs: AttributeSet
    origin_index: int = field(default=0, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "rhs", _strip_dependency("mvd", self.lhs, self.rhs))

    def render(self) -> str:
        return f"{self.lhs.render()} ->> {self.rhs.render()}"

    def display(self) -> str:
        return f"{self.lhs.render()} ↠ {self.rhs.render()}"

    def __repr__(self) -> str:
        return f"mvd({self.render()})"


Dependency = Union[FunctionalDependency, MultivaluedDependency]


@dataclass(frozen=True)
class RelationSchema:
    """A named relation: ordered attributes, dependency lists, optional key."""

    name: str
    attributes: Tuple[Attribute, ...]
    fds: Tuple[FunctionalDependency, ...] = ()
    mvds: Tuple[MultivaluedDependency, ...] = ()
    declared_key: Optional[AttributeSet] = None

    def __post_init__(self) -> None:
        seen = set()
        for pos, attr in enumerate(self.attributes):
            if attr.name in seen:
                raise DuplicateAttributeError(
                    f"attribute {attr.name!r} declared twice in {self.name}"
                )
            seen.add(attr.name)
            if attr.ordinal != pos:
                raise SchemaError(
                    f"attribute {attr.name!r} has ordinal {attr.ordinal}, expected {pos}"
                )
        declared = frozenset(self.attributes)
        for dep in (*self.fds, *self.mvds):
            for attr in dep.lhs.members | dep.rhs.members:
                if attr not in declared:
                    raise UndeclaredAttributeError(
                        f"dependency {dep.render()} references undeclared attribute {attr.name!r}"
                    )
        if self.declared_key is not None:
            if not self.declared_key:
                raise SchemaError("declared key must be nonempty")
            for attr in self.declared_key.members:
                if attr not in declared:
                    raise UndeclaredAttributeError(
                        f"key references undeclared attribute {attr.name!r}"
                    )

    @property
    def all_attributes(self) -> AttributeSet:
        return AttributeSet(frozenset(self.attributes))

    def attribute(self, name: str) -> Attribute:
        for attr in self.attributes:
            if attr.name == name:
                return attr
        raise UndeclaredAttributeError(f"no attribute {name!r} in {self.name}")

    def subset(self, *names: str) -> AttributeSet:
        return AttributeSet.of(self.attribute(n) for n in names)

    def dependencies(self) -> Tuple[Dependency, ...]:
        """All dependencies sorted by declaration position."""
        return tuple(sorted((*self.fds, *self.mvds), key=lambda d: d.origin_index))


def canonicalize(schema: RelationSchema) -> RelationSchema:
    """Rebuild a schema in canonical form.

    Dependency constructors already strip left-side attributes from right
    sides and attribute sets always iterate in ordinal order, so this mostly
    re-runs validation.  Idempotent by construction.
    """
    return RelationSchema(
        name=schema.name,
        attributes=tuple(schema.attributes),
        fds=tuple(
            FunctionalDependency(fd.lhs, fd.rhs, fd.origin_index) for fd in schema.fds
        ),
        mvds=tuple(
            MultivaluedDependency(m.lhs, m.rhs, m.origin_index) for m in schema.mvds
        ),
        declared_key=schema.declared_key,
    )


def restrict_schema(
    schema: RelationSchema,
    attrs: AttributeSet,
    name: Optional[str] = None,
    declared_key: Optional[AttributeSet] = None,
) -> RelationSchema:
    """A schema over a subset of attributes, with dependencies projected
    syntactically: FDs keep the right-side attributes that survive, MVDs are
    kept only when fully contained.  Ordinals are renumbered."""
    ordered = sorted(attrs.members, key=lambda a: a.ordinal)
    mapping = {old: Attribute(old.name, pos) for pos, old in enumerate(ordered)}

    def remap(subset: AttributeSet) -> AttributeSet:
        return AttributeSet.of(mapping[a] for a in subset.members)

    fds = []
    for fd in schema.fds:
        if fd.lhs.issubset(attrs) and fd.rhs & attrs:
            fds.append(FunctionalDependency(remap(fd.lhs), remap(fd.rhs & attrs), fd.origin_index))
    mvds = []
    for mvd in schema.mvds:
        if (mvd.lhs | mvd.rhs).issubset(attrs):
            mvds.append(MultivaluedDependency(remap(mvd.lhs), remap(mvd.rhs), mvd.origin_index))
    return RelationSchema(
        name=name if name is not None else schema.name,
        attributes=tuple(mapping[a] for a in ordered),
        fds=tuple(fds),
        mvds=tuple(mvds),
        declared_key=remap(declared_key) if declared_key is not None else None,
    )


@dataclass(frozen=True)
class ForeignKey:
    attrs: AttributeSet
    references: str


@dataclass(frozen=True)
class DecomposedTable:
    """One output table: attribute set, primary key, foreign keys, provenance."""

    name: str
    attributes: AttributeSet
    pk: AttributeSet
    fks: Tuple[ForeignKey, ...] = ()
    provenance: str = ""

    def __post_init__(self) -> None:
        if not self.pk.issubset(self.attributes):
            raise SchemaError(f"table {self.name}: pk not within attributes")
        for fk in self.fks:
            if not fk.attrs.issubset(self.attributes):
                raise SchemaError(f"table {self.name}: fk not within attributes")

    def render(self) -> str:
        """Human form: primary-key attributes prefixed *, foreign keys +."""
        fk_attrs = frozenset().union(*(fk.attrs.members for fk in self.fks)) if self.fks else frozenset()
        parts = []
        for attr in self.attributes:
            mark = "*" if attr in self.pk else ""
            if attr in fk_attrs:
                mark += "+"
            parts.append(mark + attr.name)
        return f"{self.name} ({', '.join(parts)})"


@dataclass(frozen=True)
class Decomposition:
    """An ordered list of tables plus the log of steps that produced them."""

    tables: Tuple[DecomposedTable, ...]
    log: Tuple[str, ...] = ()

    def __post_init__(self) -> None:
        names = [t.name for t in self.tables]
        if len(names) != len(set(names)):
            raise SchemaError(f"duplicate table names in decomposition: {names}")
        by_name = {t.name: t for t in self.tables}
        for table in self.tables:
            for fk in table.fks:
                target = by_name.get(fk.references)
                if target is None:
                    raise SchemaError(
                        f"table {table.name}: fk references unknown table {fk.references!r}"
                    )
                if target.pk != fk.attrs:
                    raise SchemaError(
                        f"table {table.name}: fk {fk.attrs.render()} does not equal "
                        f"primary key of {fk.references}"
                    )

    def table(self, name: str) -> DecomposedTable:
        for t in self.tables:
            if t.name == name:
                return t
        raise KeyError(name)

    def attribute_union(self) -> AttributeSet:
        out: frozenset[Attribute] = frozenset()
        for t in self.tables:
            out |= t.attributes.members
        return AttributeSet(out)


def designate_foreign_keys(
    tables: Sequence[Tuple[str, AttributeSet, AttributeSet, str]],
) -> Tuple[DecomposedTable, ...]:
    """Attach foreign keys: any subset of a table equal to the full primary
    key of another table (and not the table's own full attribute set) becomes
    a foreign key referencing that table.

    Input tuples are (name, attributes, pk, provenance).
    """
    out = []
    for name, attrs, pk, provenance in tables:
        fks = []
        for other_name, _, other_pk, _ in tables:
            if other_name == name:
                continue
            if other_pk.issubset(attrs) and other_pk != attrs:
                fks.append(ForeignKey(other_pk, other_name))
        out.append(
            DecomposedTable(
                name=name, attributes=attrs, pk=pk, fks=tuple(fks), provenance=provenance
            )
        )
    return tuple(out)

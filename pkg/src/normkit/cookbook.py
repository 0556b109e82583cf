"""The counting-and-deduplication normalization recipe.

Steps: count left- and right-side attributes of every FD; delete repeated
right-side attributes so each attribute survives in exactly one dependency
(kept where the left-side count is smallest, ties broken by the smaller
original right-side count, then by declaration order); convert each surviving
dependency into a relation whose primary key is its left side.  Left sides
are never touched.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

from .model import (
    Attribute,
    AttributeSet,
    Decomposition,
    FunctionalDependency,
    RelationSchema,
    SchemaError,
    designate_foreign_keys,
)
from .inference import primary_key


class MVDPresentError(SchemaError):
    """This method handles functional dependencies only."""


@dataclass(frozen=True)
class CountedFD:
    """An FD with its side sizes and the deletions applied to its right side.

    ``lhs_count`` never changes; ``rhs_count`` reflects the right side after
    deduplication.  Each deletion records the attribute and the index of the
    dependency that kept it.
    """

    fd: FunctionalDependency
    lhs_count: int
    rhs_count: int
    deletions: Tuple[Tuple[Attribute, int], ...] = ()

    @property
    def remaining_rhs(self) -> AttributeSet:
        deleted = frozenset(attr for attr, _ in self.deletions)
        return AttributeSet(self.fd.rhs.members - deleted)


def annotate_counts(fds: Sequence[FunctionalDependency]) -> List[CountedFD]:
    """Write the side sizes beside every dependency, order preserved."""
    return [CountedFD(fd, len(fd.lhs), len(fd.rhs)) for fd in fds]


def dedup_rhs(counted: Sequence[CountedFD]) -> List[CountedFD]:
    """Delete repeated right-side attributes.

    Every attribute that occurs on two or more right sides is kept only in
    the dependency with the smallest left-side count; when those tie, in the
    dependency with the smallest original right-side count; when both tie, in
    the earliest-declared dependency.  All comparisons use the counts as
    annotated before this pass.
    """
    holders: Dict[Attribute, List[int]] = {}
    for index, entry in enumerate(counted):
        for attr in entry.fd.rhs:
            holders.setdefault(attr, []).append(index)
    deletions: Dict[int, List[Tuple[Attribute, int]]] = {i: [] for i in range(len(counted))}
    for attr, indexes in holders.items():
        if len(indexes) < 2:
            continue
        winner = min(
            indexes, key=lambda i: (counted[i].lhs_count, counted[i].rhs_count, i)
        )
        for i in indexes:
            if i != winner:
                deletions[i].append((attr, winner))
    out = []
    for index, entry in enumerate(counted):
        removed = sorted(deletions[index], key=lambda d: d[0].ordinal)
        out.append(
            CountedFD(
                fd=entry.fd,
                lhs_count=entry.lhs_count,
                rhs_count=len(entry.fd.rhs) - len(removed),
                deletions=tuple(removed),
            )
        )
    return out


def cookbook_normalize(schema: RelationSchema) -> Decomposition:
    """Convert the deduplicated dependencies into tables.

    Each dependency with a nonempty remaining right side becomes a table
    (left side plus right side, primary key = left side).  A dependency whose
    right side emptied out still yields a key-only table when its left side
    is the schema's primary key; otherwise it is dropped with a log entry.
    The first emitted table keeps the schema's name, the rest are numbered.
    """
    if schema.mvds:
        raise MVDPresentError(
            f"{schema.name} declares multivalued dependencies; this method "
            "handles functional dependencies only"
        )
    key = primary_key(schema)
    counted = dedup_rhs(annotate_counts(schema.fds))
    log: List[str] = []
    for entry in counted:
        for attr, kept_in in entry.deletions:
            log.append(
                f"delete {attr.name} from {entry.fd.render()} "
                f"(kept in {counted[kept_in].fd.render()})"
            )
    pending: List[Tuple[AttributeSet, AttributeSet, str]] = []
    for entry in counted:
        remaining = entry.remaining_rhs
        if not remaining:
            if entry.fd.lhs == key:
                pending.append((entry.fd.lhs, entry.fd.lhs, entry.fd.render()))
                log.append(
                    f"keep key relation for {entry.fd.render()} (left side is the primary key)"
                )
            else:
                log.append(f"drop {entry.fd.render()}: right side emptied out")
            continue
        pending.append((entry.fd.lhs | remaining, entry.fd.lhs, entry.fd.render()))
    named = []
    for position, (attrs, pk, provenance) in enumerate(pending):
        name = schema.name if position == 0 else f"{schema.name}{position + 1}"
        named.append((name, attrs, pk, provenance))
    tables = designate_foreign_keys(named)
    return Decomposition(tables=tables, log=tuple(log))

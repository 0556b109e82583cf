"""Attribute closure, key search, implication, and right-reduction of FDs."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import List, Optional, Sequence, Tuple

from .model import (
    Attribute,
    AttributeSet,
    FunctionalDependency,
    RelationSchema,
    SchemaError,
)


class AttributeCapExceededError(SchemaError):
    """Key search refused: the schema has more attributes than the cap."""


class DeclaredKeyNotCandidateError(SchemaError):
    """The declared key is not a minimal superkey."""


class NoKeyError(SchemaError):
    """No candidate key could be determined."""


_FdPair = Tuple[frozenset, frozenset]


def _pairs(fds: Sequence[FunctionalDependency]) -> List[_FdPair]:
    return [(fd.lhs.members, fd.rhs.members) for fd in fds]


def _close(seed: frozenset, pairs: Sequence[_FdPair]) -> frozenset:
    current = seed
    changed = True
    while changed:
        changed = False
        for lhs, rhs in pairs:
            if lhs <= current and not rhs <= current:
                current = current | rhs
                changed = True
    return current


@dataclass(frozen=True)
class ClosureStep:
    """Attributes added in one step and the dependency that justified them.

    ``via`` is None for the initial reflexivity step.
    """

    added: AttributeSet
    via: Optional[FunctionalDependency]

    @property
    def justification(self) -> str:
        return "reflexivity" if self.via is None else self.via.render()


@dataclass(frozen=True)
class ClosureTrace:
    steps: Tuple[ClosureStep, ...]


def attribute_closure(
    seed: AttributeSet, fds: Sequence[FunctionalDependency]
) -> Tuple[AttributeSet, ClosureTrace]:
    """Least fixpoint of "if lhs is contained, add rhs", starting from seed.

    Dependencies apply in declaration order within a pass; passes repeat until
    nothing changes.  The trace records the seed (reflexivity) and every FD
    application that added at least one attribute.
    """
    current = seed.members
    steps = [ClosureStep(seed, None)]
    changed = True
    while changed:
        changed = False
        for fd in fds:
            if fd.lhs.members <= current and not fd.rhs.members <= current:
                added = fd.rhs.members - current
                current = current | added
                steps.append(ClosureStep(AttributeSet(added), fd))
                changed = True
    return AttributeSet(current), ClosureTrace(tuple(steps))


def is_superkey(attrs: AttributeSet, schema: RelationSchema) -> bool:
    """True iff the closure of attrs under the schema's FDs covers every attribute."""
    return _close(attrs.members, _pairs(schema.fds)) == schema.all_attributes.members


def candidate_keys(schema: RelationSchema, cap: int = 20) -> List[AttributeSet]:
    """All minimal superkeys, in ordinal-lexicographic order.

    The search starts from the mandatory core (attributes on no FD right
    side, which every key must contain), extends it breadth-first with
    attributes outside the core's closure, and prunes supersets of keys
    already found.  MVDs are ignored.
    """
    if len(schema.attributes) > cap:
        raise AttributeCapExceededError(
            f"{len(schema.attributes)} attributes exceed the key-search cap of {cap}"
        )
    pairs = _pairs(schema.fds)
    everything = schema.all_attributes.members
    on_rhs: frozenset = frozenset()
    for _, rhs in pairs:
        on_rhs |= rhs
    core = everything - on_rhs
    core_closure = _close(core, pairs)
    if core_closure == everything:
        found = [core]
    else:
        # candidates are core + extension; attributes already derivable from
        # the core can never appear in a minimal key
        extension_pool = [
            a for a in sorted(everything, key=lambda a: a.ordinal) if a not in core_closure
        ]
        found = []
        for size in range(1, len(extension_pool) + 1):
            for combo in combinations(extension_pool, size):
                candidate = core | frozenset(combo)
                if any(key <= candidate for key in found):
                    continue
                if _close(candidate, pairs) == everything:
                    found.append(candidate)
    if not found:
        raise NoKeyError(f"no candidate key found for {schema.name}")
    return [
        AttributeSet(k)
        for k in sorted(found, key=lambda k: tuple(sorted(a.ordinal for a in k)))
    ]


def primary_key(schema: RelationSchema, cap: int = 20) -> AttributeSet:
    """The declared key when present and minimal, else the first candidate key."""
    keys = candidate_keys(schema, cap=cap)
    if schema.declared_key is not None:
        if schema.declared_key not in keys:
            raise DeclaredKeyNotCandidateError(
                f"declared key {{{schema.declared_key.render()}}} of {schema.name} "
                "is not a minimal superkey"
            )
        return schema.declared_key
    return keys[0]


def implies(
    fds: Sequence[FunctionalDependency], candidate: FunctionalDependency
) -> bool:
    """True iff the FD set entails the candidate dependency."""
    return candidate.rhs.members <= _close(candidate.lhs.members, _pairs(fds))


def transitive_right_reduce(
    fds: Sequence[FunctionalDependency],
) -> List[FunctionalDependency]:
    """Drop right-side attributes that remain derivable without them.

    For each FD X -> Y in declaration order and each attribute a of Y in
    ordinal order, a is removed when it is still reachable from X after
    replacing X -> Y by X -> (Y minus a) in the working set.  FDs whose right
    side empties out are dropped.  The closure of every attribute set is
    unchanged by this transformation.
    """
    work: List[_FdPair] = _pairs(fds)
    for i, fd in enumerate(fds):
        lhs = fd.lhs.members
        rhs = work[i][1]
        for attr in sorted(rhs, key=lambda a: a.ordinal):
            trial_rhs = rhs - {attr}
            others = [
                pair
                for j, pair in enumerate(work)
                if j != i and pair[1]
            ]
            if trial_rhs:
                others.append((lhs, trial_rhs))
            if attr in _close(lhs, others):
                rhs = trial_rhs
        work[i] = (lhs, rhs)
    return [
        FunctionalDependency(fd.lhs, AttributeSet(rhs), fd.origin_index)
        for fd, (_, rhs) in zip(fds, work)
        if rhs
    ]


def suppress_alternative_key_fds(
    fds: Sequence[FunctionalDependency], schema: RelationSchema
) -> List[FunctionalDependency]:
    """Remove FDs whose determinant is a candidate key other than the primary key."""
    keys = {k.members for k in candidate_keys(schema)}
    pk = primary_key(schema).members
    alternates = keys - {pk}
    return [fd for fd in fds if fd.lhs.members not in alternates]

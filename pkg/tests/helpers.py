"""Shared test machinery: random schema generators and independent oracles."""

from __future__ import annotations

import random
import string
from typing import List, Optional, Sequence, Tuple

from normkit.model import (
    Attribute,
    AttributeSet,
    FunctionalDependency,
    RelationSchema,
    SchemaError,
)
from normkit.diagram import takeout_normalize


def closure_oracle(
    seed: AttributeSet,
    fds: Sequence[FunctionalDependency],
    universe: AttributeSet,
) -> AttributeSet:
    """Definition-based closure: the intersection of every closed superset of
    the seed.  Independent of the fixpoint implementation; exponential in the
    attribute count, so keep schemas small."""
    ordered = sorted(universe.members, key=lambda a: a.ordinal)
    best: Optional[frozenset] = None
    for mask in range(1 << len(ordered)):
        subset = frozenset(a for i, a in enumerate(ordered) if mask >> i & 1)
        if not seed.members <= subset:
            continue
        if any(fd.lhs.members <= subset and not fd.rhs.members <= subset for fd in fds):
            continue
        best = subset if best is None else best & subset
    assert best is not None
    return AttributeSet(best)


def make_attrs(count: int) -> Tuple[Attribute, ...]:
    return tuple(Attribute(string.ascii_uppercase[i], i) for i in range(count))


def schema_from_specs(
    name: str,
    count: int,
    fd_specs: Sequence[Tuple[Sequence[int], Sequence[int]]],
    key: Optional[Sequence[int]] = None,
) -> RelationSchema:
    """Build a schema from attribute-index pairs, e.g. ([0], [1, 2])."""
    attrs = make_attrs(count)
    fds = tuple(
        FunctionalDependency(
            AttributeSet.of(attrs[i] for i in lhs),
            AttributeSet.of(attrs[i] for i in rhs),
            index,
        )
        for index, (lhs, rhs) in enumerate(fd_specs)
    )
    return RelationSchema(
        name=name,
        attributes=attrs,
        fds=fds,
        declared_key=AttributeSet.of(attrs[i] for i in key) if key else None,
    )


def random_task_schema(
    rng: random.Random, max_attrs: int = 8, max_fds: int = 6
) -> RelationSchema:
    """A random normalization task in the style the decomposition methods are
    meant for: a designated key determines everything, and the extra FDs are
    partial (subset of the key), transitive (from one earlier non-key
    attribute), or mixed (key attributes plus one non-key attribute).

    Shape constraints keep the methods applicable: each extra determinant
    carries at most one non-key attribute, declared right sides are disjoint
    across the extra FDs and never contain key attributes, and right sides sit
    strictly later in declaration order than non-key determinant attributes,
    so the dependency structure is acyclic and the chosen key is the unique
    candidate key.  All right sides are closed under the declared set at the
    end.
    """
    for _ in range(50):
        n = rng.randint(4, max_attrs)
        attrs = make_attrs(n)
        key_size = rng.randint(1, min(3, n - 2))
        key_positions = sorted(rng.sample(range(n), key_size))
        key = [attrs[i] for i in key_positions]
        nonkey = [attrs[i] for i in range(n) if i not in key_positions]

        specs: List[Tuple[List[Attribute], List[Attribute]]] = [(list(key), list(nonkey))]
        unclaimed = list(nonkey)
        target = rng.randint(1, max_fds - 1)
        attempts = 0
        while len(specs) - 1 < target and attempts < 20:
            attempts += 1
            kind = rng.choice(("partial", "transitive", "mixed"))
            if kind == "partial" and key_size >= 2:
                lhs = rng.sample(key, rng.randint(1, key_size - 1))
                pool = unclaimed
            elif kind in ("transitive", "mixed") and len(nonkey) >= 2:
                split = rng.randint(1, len(nonkey) - 1)
                anchor = nonkey[rng.randrange(split)]
                lhs = [anchor]
                if kind == "mixed":
                    lhs += rng.sample(key, rng.randint(1, key_size))
                pool = [a for a in unclaimed if a.ordinal > anchor.ordinal]
            else:
                continue
            if not pool:
                continue
            cap = 3 if len(specs) < 3 else 2
            rhs = rng.sample(pool, rng.randint(1, min(cap, len(pool))))
            for attr in rhs:
                unclaimed.remove(attr)
            specs.append((lhs, rhs))

        fds = []
        for lhs, rhs in specs:
            fds.append((frozenset(lhs), frozenset(rhs) - frozenset(lhs)))

        def close(seed):
            current = frozenset(seed)
            changed = True
            while changed:
                changed = False
                for other_lhs, other_rhs in fds:
                    if other_lhs <= current and not other_rhs <= current:
                        current |= other_rhs
                        changed = True
            return current

        # determinants must be left-reduced, as in the tasks the methods
        # target; a mixed determinant can lose that once later FDs land
        if any(
            attr in close(lhs - {attr})
            for lhs, _ in fds
            for attr in lhs
        ):
            continue
        closed = [(lhs, close(lhs) - lhs) for lhs, _ in fds]
        schema = RelationSchema(
            name="R",
            attributes=attrs,
            fds=tuple(
                FunctionalDependency(AttributeSet(lhs), AttributeSet(rhs), i)
                for i, (lhs, rhs) in enumerate(closed)
                if rhs
            ),
        )
        try:
            takeout_normalize(schema)
        except SchemaError:
            continue
        return schema
    raise AssertionError("could not generate a usable random schema")


def random_fd_schema(
    rng: random.Random, max_attrs: int = 10, max_fds: int = 6
) -> RelationSchema:
    """A fully unconstrained random FD set, for key-search oracle checks."""
    n = rng.randint(2, max_attrs)
    attrs = make_attrs(n)
    fds = []
    for index in range(rng.randint(0, max_fds)):
        lhs = frozenset(rng.sample(attrs, rng.randint(1, min(3, n))))
        rest = [a for a in attrs if a not in lhs]
        if not rest:
            continue
        rhs = frozenset(rng.sample(rest, rng.randint(1, min(3, len(rest)))))
        fds.append(FunctionalDependency(AttributeSet(lhs), AttributeSet(rhs), index))
    return RelationSchema(name="R", attributes=attrs, fds=tuple(fds))


def task_corpus(seed: int, count: int, **kwargs) -> List[RelationSchema]:
    rng = random.Random(seed)
    return [random_task_schema(rng, **kwargs) for _ in range(count)]

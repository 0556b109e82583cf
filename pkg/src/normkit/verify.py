"""Independent checks on decompositions: chase-based losslessness,
dependency preservation, a brute-force key oracle, and a sampled-instance
join test."""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, List, Sequence, Set, Tuple

from .model import (
    Attribute,
    AttributeSet,
    Decomposition,
    FunctionalDependency,
    RelationSchema,
    SchemaError,
)
from .inference import _close, _pairs


class CoverageError(SchemaError):
    """The decomposition does not cover every schema attribute."""


class RowCapExceededError(SchemaError):
    """The chase generated more rows than the safety cap allows."""


MVD_ROW_CAP = 4096


def _check_coverage(schema: RelationSchema, d: Decomposition) -> None:
    missing = schema.all_attributes - d.attribute_union()
    if missing:
        raise CoverageError(
            f"decomposition misses attributes: {missing.render()}"
        )


@dataclass
class Tableau:
    """One symbolic row per table; cell values are symbol ids.

    The distinguished symbol for column j is j itself; subscripted symbols
    get ids >= the column count, so union-by-minimum naturally promotes
    cells toward distinguished symbols.
    """

    width: int
    rows: List[Tuple[int, ...]]
    parent: Dict[int, int]

    @classmethod
    def for_decomposition(cls, schema: RelationSchema, d: Decomposition) -> "Tableau":
        width = len(schema.attributes)
        rows = []
        next_symbol = width
        parent: Dict[int, int] = {}
        for table in d.tables:
            row = []
            for attr in schema.attributes:
                if attr in table.attributes:
                    row.append(attr.ordinal)
                else:
                    row.append(next_symbol)
                    next_symbol += 1
            rows.append(tuple(row))
        for row in rows:
            for symbol in row:
                parent.setdefault(symbol, symbol)
        return cls(width=width, rows=rows, parent=parent)

    def find(self, symbol: int) -> int:
        root = symbol
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[symbol] != root:
            self.parent[symbol], symbol = root, self.parent[symbol]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        # the smaller id wins, so distinguished symbols absorb subscripted ones
        if ra < rb:
            self.parent[rb] = ra
        else:
            self.parent[ra] = rb
        return True

    def resolved_rows(self) -> List[Tuple[int, ...]]:
        return [tuple(self.find(s) for s in row) for row in self.rows]

    def has_distinguished_row(self) -> bool:
        return any(
            all(self.find(s) == j for j, s in enumerate(row)) for row in self.rows
        )


def _ordinals(attrs: AttributeSet) -> Tuple[int, ...]:
    return attrs.ordinals


def is_lossless(schema: RelationSchema, d: Decomposition) -> bool:
    """Chase the decomposition tableau; true iff some row becomes fully
    distinguished.  FDs equate symbols, MVDs add swapped rows (capped)."""
    _check_coverage(schema, d)
    tableau = Tableau.for_decomposition(schema, d)
    fd_rules = [(_ordinals(fd.lhs), _ordinals(fd.rhs)) for fd in schema.fds]
    mvd_rules = [(_ordinals(m.lhs), _ordinals(m.rhs)) for m in schema.mvds]
    changed = True
    while changed:
        changed = False
        for lhs, rhs in fd_rules:
            rows = tableau.resolved_rows()
            for i, j in combinations(range(len(rows)), 2):
                if all(rows[i][c] == rows[j][c] for c in lhs):
                    for c in rhs:
                        if tableau.union(rows[i][c], rows[j][c]):
                            changed = True
                    rows = tableau.resolved_rows()
        for lhs, rhs in mvd_rules:
            rows = tableau.resolved_rows()
            seen: Set[Tuple[int, ...]] = set(rows)
            added = []
            for i in range(len(rows)):
                for j in range(len(rows)):
                    if i == j:
                        continue
                    if not all(rows[i][c] == rows[j][c] for c in lhs):
                        continue
                    swapped = tuple(
                        rows[i][c] if c in rhs else rows[j][c]
                        for c in range(tableau.width)
                    )
                    if swapped not in seen:
                        seen.add(swapped)
                        added.append(swapped)
            if added:
                if len(tableau.rows) + len(added) > MVD_ROW_CAP:
                    raise RowCapExceededError(
                        f"chase needs more than {MVD_ROW_CAP} rows"
                    )
                tableau.rows.extend(added)
                changed = True
        if tableau.has_distinguished_row():
            return True
    return tableau.has_distinguished_row()


def preserves_dependencies(
    schema: RelationSchema, d: Decomposition
) -> Tuple[bool, List[FunctionalDependency]]:
    """Check every declared FD against the decomposition's projections.

    An FD X -> Y survives when the fixpoint of Z := Z + (closure(Z & Ti) & Ti)
    over all tables Ti, starting from Z = X, reaches Y.
    """
    _check_coverage(schema, d)
    pairs = _pairs(schema.fds)
    table_sets = [t.attributes.members for t in d.tables]
    lost: List[FunctionalDependency] = []
    for fd in schema.fds:
        z = fd.lhs.members
        changed = True
        while changed:
            changed = False
            for table in table_sets:
                gained = _close(z & table, pairs) & table
                if not gained <= z:
                    z = z | gained
                    changed = True
        if not fd.rhs.members <= z:
            lost.append(fd)
    return (not lost, lost)


def brute_force_candidate_keys(
    schema: RelationSchema, cap: int = 16
) -> List[AttributeSet]:
    """Oracle key search: every subset in size-then-ordinal order, keeping
    the superkeys that contain no smaller superkey."""
    if len(schema.attributes) > cap:
        raise SchemaError(
            f"{len(schema.attributes)} attributes exceed the brute-force cap of {cap}"
        )
    pairs = _pairs(schema.fds)
    everything = schema.all_attributes.members
    found: List[frozenset] = []
    ordered = sorted(everything, key=lambda a: a.ordinal)
    for size in range(0, len(ordered) + 1):
        for combo in combinations(ordered, size):
            candidate = frozenset(combo)
            if any(key <= candidate for key in found):
                continue
            if _close(candidate, pairs) == everything:
                found.append(candidate)
    return [AttributeSet(k) for k in found]


_INSTANCE_ROW_CAP = 256


class _NeedsRegen(Exception):
    pass


def _repair_instance(
    rows: Set[Tuple[int, ...]],
    fd_rules: Sequence[Tuple[Tuple[int, ...], Tuple[int, ...]]],
    mvd_rules: Sequence[Tuple[Tuple[int, ...], Tuple[int, ...]]],
    width: int,
) -> Set[Tuple[int, ...]]:
    """Force a random instance to satisfy all dependencies.

    FD conflicts merge dependent values onto the first row in sorted order;
    MVD gaps are filled by adding the swapped tuple.  Additions are capped,
    and a pass limit guards the merge loop.
    """
    for _pass in range(200):
        changed = False
        for lhs, rhs in fd_rules:
            canon: Dict[Tuple[int, ...], Tuple[int, ...]] = {}
            fixed = set()
            for row in sorted(rows):
                lhs_vals = tuple(row[c] for c in lhs)
                keeper = canon.get(lhs_vals)
                if keeper is None:
                    canon[lhs_vals] = row
                    fixed.add(row)
                else:
                    merged = tuple(
                        keeper[c] if c in rhs else row[c] for c in range(width)
                    )
                    if merged != row:
                        changed = True
                    fixed.add(merged)
            rows = fixed
        for lhs, rhs in mvd_rules:
            listed = sorted(rows)
            for r in listed:
                for s in listed:
                    if r == s:
                        continue
                    if not all(r[c] == s[c] for c in lhs):
                        continue
                    swapped = tuple(
                        r[c] if c in rhs else s[c] for c in range(width)
                    )
                    if swapped not in rows:
                        rows.add(swapped)
                        changed = True
                        if len(rows) > _INSTANCE_ROW_CAP:
                            raise _NeedsRegen
        if not changed:
            return rows
    raise _NeedsRegen


def _project(
    rows: Set[Tuple[int, ...]], columns: Tuple[int, ...]
) -> Set[Tuple[int, ...]]:
    return {tuple(row[c] for c in columns) for row in rows}


def _natural_join(
    left: Tuple[Tuple[int, ...], Set[Tuple[int, ...]]],
    right: Tuple[Tuple[int, ...], Set[Tuple[int, ...]]],
) -> Tuple[Tuple[int, ...], Set[Tuple[int, ...]]]:
    left_cols, left_rows = left
    right_cols, right_rows = right
    shared = [c for c in left_cols if c in right_cols]
    left_pos = [left_cols.index(c) for c in shared]
    right_pos = [right_cols.index(c) for c in shared]
    extra = [i for i, c in enumerate(right_cols) if c not in left_cols]
    out_cols = tuple(left_cols) + tuple(right_cols[i] for i in extra)
    index: Dict[Tuple[int, ...], List[Tuple[int, ...]]] = {}
    for row in right_rows:
        index.setdefault(tuple(row[p] for p in right_pos), []).append(row)
    out_rows = set()
    for row in left_rows:
        for match in index.get(tuple(row[p] for p in left_pos), ()):
            out_rows.add(row + tuple(match[i] for i in extra))
    return out_cols, out_rows


def instance_join_check(
    schema: RelationSchema, d: Decomposition, seed: int, trials: int
) -> bool:
    """Probabilistic second opinion on losslessness.

    Each trial draws a small random instance, repairs it to satisfy every
    declared dependency, projects it onto the decomposition's tables, and
    re-joins the projections.  True iff every trial's join equals the
    instance exactly.  Fully seeded and reproducible.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    _check_coverage(schema, d)
    width = len(schema.attributes)
    fd_rules = [(_ordinals(fd.lhs), _ordinals(fd.rhs)) for fd in schema.fds]
    mvd_rules = [(_ordinals(m.lhs), _ordinals(m.rhs)) for m in schema.mvds]
    table_columns = [t.attributes.ordinals for t in d.tables]
    rng = random.Random(seed)
    for _ in range(trials):
        for _attempt in range(8):
            sub = random.Random(rng.randrange(2**32))
            rows = {
                tuple(sub.randrange(4) for _ in range(width))
                for _ in range(sub.randint(1, 8))
            }
            try:
                rows = _repair_instance(rows, fd_rules, mvd_rules, width)
                break
            except _NeedsRegen:
                continue
        else:
            raise RowCapExceededError("could not repair a random instance within the cap")
        relation = (table_columns[0], _project(rows, table_columns[0]))
        for columns in table_columns[1:]:
            relation = _natural_join(relation, (columns, _project(rows, columns)))
        out_cols, out_rows = relation
        order = [out_cols.index(c) for c in range(width)]
        rejoined = {tuple(row[p] for p in order) for row in out_rows}
        if rejoined != rows:
            return False
    return True

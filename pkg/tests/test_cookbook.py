import random

import pytest

from normkit.cookbook import (
    MVDPresentError,
    annotate_counts,
    cookbook_normalize,
    dedup_rhs,
)
from normkit.classify import ViolationLabel, classify_fd
from normkit.inference import primary_key
from normkit.model import restrict_schema
from normkit.verify import is_lossless, preserves_dependencies

from helpers import random_task_schema, schema_from_specs


def test_annotate_counts_t14(t14):
    counted = annotate_counts(t14.fds)
    assert [(c.lhs_count, c.rhs_count) for c in counted] == [
        (2, 11),
        (1, 3),
        (1, 8),
        (1, 3),
        (2, 1),
    ]


def test_annotate_counts_trivial():
    assert annotate_counts([]) == []
    schema = schema_from_specs("R", 2, [([0], [1])])
    counted = annotate_counts(schema.fds)
    assert [(c.lhs_count, c.rhs_count) for c in counted] == [(1, 1)]


def test_dedup_t14(t14):
    deduped = dedup_rhs(annotate_counts(t14.fds))
    remaining = [c.remaining_rhs.render() for c in deduped]
    assert remaining == [
        "",
        "B, C, D",
        "F, G, H, I, J",
        "K, L, M",
        "N",
    ]
    # rule b: the smaller-lhs dependency keeps K, L, M over the larger rhs
    kept_in = {attr.name: keeper for attr, keeper in deduped[2].deletions}
    assert kept_in == {"K": 3, "L": 3, "M": 3}
    # counts after the pass reflect the surviving right sides
    assert [c.rhs_count for c in deduped] == [0, 3, 5, 3, 1]
    # left sides untouched
    assert [c.fd.lhs.render() for c in deduped] == ["A, E", "A", "E", "J", "D, E"]


def test_dedup_disjoint_unchanged():
    schema = schema_from_specs("R", 4, [([0], [1]), ([2], [3])])
    deduped = dedup_rhs(annotate_counts(schema.fds))
    assert all(not c.deletions for c in deduped)


def test_dedup_rule_a():
    # {A -> X, B C -> X}: X stays with the smaller determinant
    schema = schema_from_specs("R", 4, [([0], [3]), ([1, 2], [3])])
    deduped = dedup_rhs(annotate_counts(schema.fds))
    assert deduped[0].remaining_rhs.render() == "D"
    assert deduped[1].remaining_rhs.render() == ""
    assert deduped[1].deletions[0][1] == 0


def test_dedup_rule_b_uses_original_counts():
    # equal lhs counts: keep where the original rhs count is smaller
    schema = schema_from_specs("R", 5, [([0], [2, 3, 4]), ([1], [2])])
    deduped = dedup_rhs(annotate_counts(schema.fds))
    assert deduped[0].remaining_rhs.render() == "D, E"
    assert deduped[1].remaining_rhs.render() == "C"


def test_dedup_full_tie_keeps_earliest():
    schema = schema_from_specs("R", 3, [([0], [2]), ([1], [2])])
    deduped = dedup_rhs(annotate_counts(schema.fds))
    assert deduped[0].remaining_rhs.render() == "C"
    assert deduped[1].remaining_rhs.render() == ""


def test_cookbook_t14_tables(t14):
    decomposition = cookbook_normalize(t14)
    shapes = [(t.name, t.attributes.names, t.pk.names) for t in decomposition.tables]
    assert shapes == [
        ("T", ("A", "E"), ("A", "E")),
        ("T2", ("A", "B", "C", "D"), ("A",)),
        ("T3", ("E", "F", "G", "H", "I", "J"), ("E",)),
        ("T4", ("J", "K", "L", "M"), ("J",)),
        ("T5", ("D", "E", "N"), ("D", "E")),
    ]


def test_cookbook_t14_foreign_keys(t14):
    decomposition = cookbook_normalize(t14)
    fk_pairs = {
        (table.name, fk.attrs.render(), fk.references)
        for table in decomposition.tables
        for fk in table.fks
    }
    assert fk_pairs == {
        ("T", "A", "T2"),
        ("T", "E", "T3"),
        ("T3", "J", "T4"),
        ("T5", "E", "T3"),
    }


def test_cookbook_single_fd():
    schema = schema_from_specs("R", 2, [([0], [1])])
    decomposition = cookbook_normalize(schema)
    assert [t.render() for t in decomposition.tables] == ["R (*A, B)"]


def test_cookbook_key_relation_only_survives_for_primary_key():
    # the emptied dependency's determinant is not the key: dropped with a log
    schema = schema_from_specs(
        "R", 4, [([0], [1, 2, 3]), ([1], [2, 3]), ([2], [3])]
    )
    # dedup: B keeps C, D?  rule a: fd1 lhs 1 vs fd0 lhs 1 -> tie; original rhs
    # counts 2 vs 3 -> C and D stay in fd1; D then moves to fd2 (rhs 1)
    decomposition = cookbook_normalize(schema)
    names = [t.name for t in decomposition.tables]
    shapes = [(t.attributes.names, t.pk.names) for t in decomposition.tables]
    assert (("A", "B"), ("A",)) in shapes
    assert any("drop" in line for line in decomposition.log) is False
    # now force a drop: two dependencies with identical sides, neither the key
    schema2 = schema_from_specs("R", 3, [([0], [1, 2]), ([1], [2]), ([1], [2])])
    decomposition2 = cookbook_normalize(schema2)
    assert any("drop" in line for line in decomposition2.log)


def test_cookbook_rejects_mvds(t12):
    with pytest.raises(MVDPresentError):
        cookbook_normalize(t12)


def test_cookbook_random_corpus_quality():
    # right-closed task schemas: tables re-classify clean, decomposition is
    # lossless and preserves every dependency
    rng = random.Random(88)
    for _ in range(60):
        schema = random_task_schema(rng)
        deduped = dedup_rhs(annotate_counts(schema.fds))
        seen = set()
        for index, entry in enumerate(deduped):
            assert entry.fd.lhs == schema.fds[index].lhs
            for attr in entry.remaining_rhs:
                assert attr not in seen  # each attribute survives on one rhs
                seen.add(attr)
        decomposition = cookbook_normalize(schema)
        covered = decomposition.attribute_union().members
        expected = set(primary_key(schema).members)
        for fd in schema.fds:
            expected |= fd.lhs.members | fd.rhs.members
        assert covered == expected
        assert is_lossless(schema, decomposition)
        ok, lost = preserves_dependencies(schema, decomposition)
        assert ok, [fd.render() for fd in lost]
        for table in decomposition.tables:
            sub = restrict_schema(
                schema, table.attributes, name=table.name, declared_key=table.pk
            )
            for fd in sub.fds:
                label = classify_fd(fd, sub, sub.declared_key)
                assert label not in (ViolationLabel.NF2, ViolationLabel.NF3)

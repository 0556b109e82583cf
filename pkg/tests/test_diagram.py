import itertools
import random

import pytest

from normkit.diagram import (
    CyclicDependencyError,
    UnreachableAttributeError,
    build_diagram,
    emit_dot,
    takeout_normalize,
)
from normkit.dsl import parse_schema
from normkit.inference import implies, primary_key
from normkit.model import FunctionalDependency

from conftest import GOLDENS
from helpers import random_task_schema, schema_from_specs


def table_shape(decomposition):
    return {(t.attributes.names, t.pk.names) for t in decomposition.tables}


def test_t12_columns(t12):
    diagram = build_diagram(t12)
    names = [[a.name for a in column] for column in diagram.columns]
    assert names == [
        ["A", "D", "H", "I"],
        ["B", "C", "E", "F", "J", "K"],
        ["G", "L"],
    ]


def test_t12_edges_reduced_and_counted(t12):
    diagram = build_diagram(t12)
    fd_edges = [e for e in diagram.edges if e.kind == "fd"]
    mvd_edges = [e for e in diagram.edges if e.kind == "mvd"]
    # I -> L dropped by right-reduction: 8 FD edges remain, plus 3 MVD edges
    assert len(fd_edges) == 8
    assert len(mvd_edges) == 3
    dependents = {e.dependent.name for e in fd_edges}
    assert "L" in dependents  # via K -> L, not I -> L
    i_edges = {e.dependent.name for e in fd_edges if e.determinant.names == ("I",)}
    assert i_edges == {"J", "K"}


def test_single_fd_diagram():
    schema = parse_schema("schema S\nattributes A, B\nfd A -> B\n")
    diagram = build_diagram(schema)
    assert [[a.name for a in col] for col in diagram.columns] == [["A"], ["B"]]
    assert len(diagram.edges) == 1


def test_unreachable_attribute():
    schema = parse_schema("schema S\nattributes A, B, Z\nfd A -> B\n")
    # Z is on no right side, so it lands in the key; make it unreachable by
    # declaring the true key explicitly and leaving Z dangling
    schema = parse_schema(
        "schema S\nattributes A, B, Z\nfd A -> B\nfd B -> A\nfd B -> Z\n"
    )
    # keys {A}, {B}; fds from the alternative key {B} are suppressed, which
    # orphans Z
    with pytest.raises(UnreachableAttributeError):
        build_diagram(schema)


def test_cycle_detected():
    # B and C determine each other outside the key; no column fits both
    schema = parse_schema(
        "schema S\nattributes A, B, C\nfd A -> B\nfd B -> C\nfd C -> B\n"
    )
    with pytest.raises(CyclicDependencyError):
        build_diagram(schema)


def test_fd_into_key_is_allowed():
    # dependents inside the key do not constrain column placement
    schema = parse_schema(
        "schema S\nattributes K, A, B, C\nfd K -> A\nfd A, B -> C\nfd A, C -> B\n"
    )
    diagram = build_diagram(schema)
    assert [[a.name for a in col] for col in diagram.columns] == [
        ["K", "B"],
        ["A"],
        ["C"],
    ]


def test_emit_dot_goldens(t12):
    golden = (GOLDENS / "t12_diagram.dot").read_text(encoding="utf-8")
    assert emit_dot(build_diagram(t12)) == golden
    single = parse_schema("schema S\nattributes A, B\nfd A -> B\n")
    golden_single = (GOLDENS / "single_edge.dot").read_text(encoding="utf-8")
    assert emit_dot(build_diagram(single)) == golden_single


def test_emit_dot_junction(t12):
    dot = emit_dot(build_diagram(t12))
    assert dot.count("[shape=point]") == 1
    assert "C -> junction_C_D [dir=none];" in dot
    assert "D -> junction_C_D [dir=none];" in dot
    assert "junction_C_D -> G;" in dot
    assert dot.count('arrowhead=vee, color="black:black"') == 3


def test_emit_dot_crossed_marks(t12):
    _, diagram = takeout_normalize(t12)
    golden = (GOLDENS / "t12_after_takeout.dot").read_text(encoding="utf-8")
    assert emit_dot(diagram) == golden
    assert "D [label=" not in golden  # key attribute D is never crossed


def test_takeout_t12_reference_tables(t12):
    decomposition, diagram = takeout_normalize(t12)
    assert table_shape(decomposition) == {
        (("K", "L"), ("K",)),
        (("A", "B", "C"), ("A",)),
        (("D", "E", "F"), ("D",)),
        (("I", "J", "K"), ("I",)),
        (("C", "D", "G"), ("C", "D")),
        (("A", "D", "H"), ("A", "D", "H")),
        (("D", "I"), ("D", "I")),
    }
    # no leftover named residual beyond those seven tables
    assert len(decomposition.tables) == 7
    assert decomposition.attribute_union() == t12.all_attributes
    crossed_names = {a.name for a in diagram.crossed}
    assert crossed_names == {"B", "C", "E", "F", "G", "J", "K", "L", "A", "H"}


def test_takeout_t12_foreign_keys(t12):
    decomposition, _ = takeout_normalize(t12)
    by_shape = {t.attributes.names: t for t in decomposition.tables}
    t5 = by_shape[("I", "J", "K")]
    assert [(fk.attrs.names, by_shape_name(decomposition, fk.references)) for fk in t5.fks] == [
        (("K",), ("K", "L"))
    ]
    residual = by_shape[("D", "I")]
    targets = {fk.references for fk in residual.fks}
    assert {decomposition.table(n).attributes.names for n in targets} == {
        ("D", "E", "F"),
        ("I", "J", "K"),
    }


def by_shape_name(decomposition, name):
    return decomposition.table(name).attributes.names


def test_superkey_determinant_not_taken_out():
    schema = schema_from_specs("R", 2, [([0], [1])])
    decomposition, diagram = takeout_normalize(schema)
    assert [t.render() for t in decomposition.tables] == ["R (*A, B)"]
    assert not diagram.crossed
    assert all(step.group != 1 for step in diagram.steps)


def test_rentacar_takeout(rentacar):
    decomposition, _ = takeout_normalize(rentacar)
    assert table_shape(decomposition) == {
        (("ManufacturerID", "ManufacturerName"), ("ManufacturerID",)),
        (("RenterID", "RenterName", "RenterAddress"), ("RenterID",)),
        (("RegisteredNumber", "CarType", "ManufacturerID"), ("RegisteredNumber",)),
        (
            ("RegisteredNumber", "RenterID", "Date", "Time"),
            ("RegisteredNumber", "Date"),
        ),
    }
    residual = decomposition.table("Rent_a_car")
    assert residual.pk.names == ("RegisteredNumber", "Date")


def test_same_determinant_fds_merge():
    # two declared FDs with one determinant produce two takeouts whose tables
    # then merge, keeping the lower-numbered name
    schema = schema_from_specs("R", 4, [([0, 3], [1, 2]), ([0], [1]), ([0], [2])])
    decomposition, diagram = takeout_normalize(schema)
    merged = decomposition.table("T1")
    assert merged.attributes.names == ("A", "B", "C")
    assert merged.pk.names == ("A",)
    assert merged.provenance == "merged"
    assert sum(1 for step in diagram.steps if step.group == 1) == 2
    assert any("merge T2 into T1" in line for line in decomposition.log)


def test_superkey_fd_keeps_dependents_in_residual():
    # the whole-key FD is not taken out; its dependents stay in the residual
    schema = schema_from_specs("R", 3, [([0, 1], [2])])
    decomposition, _ = takeout_normalize(schema)
    assert [t.render() for t in decomposition.tables] == ["R (*A, *B, C)"]


def test_shared_dependent_crossed_once():
    # C depends on both A and B; both takeouts happen, C crossed once
    schema = schema_from_specs("R", 3, [([0, 1], [2]), ([0], [2]), ([1], [2])])
    decomposition, diagram = takeout_normalize(schema)
    shapes = table_shape(decomposition)
    assert (("A", "C"), ("A",)) in shapes
    assert (("B", "C"), ("B",)) in shapes
    crossings = [step.crossed for step in diagram.steps if step.group == 1]
    total_crossed = [a.name for crossed in crossings for a in crossed]
    assert total_crossed.count("C") == 1


def test_group1_order_invariance_explicit(t12):
    base, _ = takeout_normalize(t12)
    base_shape = table_shape(base)
    for perm in itertools.permutations(range(5)):
        other, _ = takeout_normalize(t12, group1_order=list(perm))
        assert table_shape(other) == base_shape


def test_group1_order_argument_validated(t12):
    with pytest.raises(ValueError):
        takeout_normalize(t12, group1_order=[0, 0, 1, 2, 3])


def test_takeout_random_corpus_invariants():
    rng = random.Random(4040)
    for _ in range(60):
        schema = random_task_schema(rng)
        decomposition, diagram = takeout_normalize(schema)
        # attribute conservation
        assert decomposition.attribute_union() == schema.all_attributes
        # crossings are disjoint across steps
        seen = set()
        for step in diagram.steps:
            assert seen.isdisjoint(step.crossed.members)
            seen |= step.crossed.members
        # every table's pk determines its own attributes under the schema FDs
        for table in decomposition.tables:
            claim = table.attributes - table.pk
            if claim:
                assert implies(
                    schema.fds,
                    FunctionalDependency(table.pk, claim),
                )

"""Per-dependency violation labels and the whole-schema normal form.

The labelling convention: a dependency whose determinant is a superkey
violates nothing; a determinant that is a proper subset of the primary key is
a partial (2NF) violation; a determinant disjoint from the primary key is a
transitive (3NF) violation; a determinant that mixes key and non-key
attributes without being a superkey is a BCNF violation.  Nontrivial MVDs not
subsumed by a declared FD violate 4NF.  "Prime" is judged against the primary
key only.
"""

from __future__ import annotations

import enum
from typing import List, Optional, Tuple

from .model import (
    AttributeSet,
    FunctionalDependency,
    MultivaluedDependency,
    RelationSchema,
)
from .inference import is_superkey, primary_key


class ViolationLabel(enum.Enum):
    NONE = "none"
    NF2 = "2NF"
    NF3 = "3NF"
    BCNF = "BCNF"
    NF4 = "4NF"


class NormalForm(enum.IntEnum):
    NF1 = 1
    NF2 = 2
    NF3 = 3
    BCNF = 4
    NF4 = 5

    @property
    def label(self) -> str:
        return {1: "1NF", 2: "2NF", 3: "3NF", 4: "BCNF", 5: "4NF"}[int(self)]


def classify_fd(
    fd: FunctionalDependency,
    schema: RelationSchema,
    key: Optional[AttributeSet] = None,
) -> ViolationLabel:
    """Label one FD.  Depends only on the determinant, never on the right side."""
    if is_superkey(fd.lhs, schema):
        return ViolationLabel.NONE
    key = key if key is not None else primary_key(schema)
    if fd.lhs.ispropersubset(key):
        return ViolationLabel.NF2
    if fd.lhs.isdisjoint(key):
        return ViolationLabel.NF3
    return ViolationLabel.BCNF


def classify_mvd(mvd: MultivaluedDependency, schema: RelationSchema) -> ViolationLabel:
    """Label one MVD: nothing when trivial or subsumed by a declared FD, else 4NF."""
    if (mvd.lhs | mvd.rhs) == schema.all_attributes:
        return ViolationLabel.NONE
    for fd in schema.fds:
        if fd.lhs == mvd.lhs and mvd.rhs.issubset(fd.rhs):
            return ViolationLabel.NONE
    return ViolationLabel.NF4


def dependency_labels(
    schema: RelationSchema,
) -> Tuple[List[Tuple[FunctionalDependency, ViolationLabel]], List[Tuple[MultivaluedDependency, ViolationLabel]]]:
    """Labels for every declared dependency, in declaration order."""
    key = primary_key(schema)
    fd_labels = [(fd, classify_fd(fd, schema, key)) for fd in schema.fds]
    mvd_labels = [(mvd, classify_mvd(mvd, schema)) for mvd in schema.mvds]
    return fd_labels, mvd_labels


def schema_normal_form(schema: RelationSchema) -> NormalForm:
    """The highest form the schema satisfies, given its violation labels."""
    fd_labels, mvd_labels = dependency_labels(schema)
    labels = {label for _, label in fd_labels} | {label for _, label in mvd_labels}
    if ViolationLabel.NF2 in labels:
        return NormalForm.NF1
    if ViolationLabel.NF3 in labels:
        return NormalForm.NF2
    if ViolationLabel.BCNF in labels:
        return NormalForm.NF3
    if ViolationLabel.NF4 in labels:
        return NormalForm.BCNF
    return NormalForm.NF4

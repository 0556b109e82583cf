"""normkit: relational schema analysis and normalization toolkit."""

from .model import (
    Attribute,
    AttributeSet,
    Decomposition,
    DecomposedTable,
    ForeignKey,
    FunctionalDependency,
    MultivaluedDependency,
    RelationSchema,
    SchemaError,
    canonicalize,
)
from .dsl import ParseDiagnostic, ParseError, parse_schema, render_schema
from .inference import (
    attribute_closure,
    candidate_keys,
    implies,
    is_superkey,
    primary_key,
    suppress_alternative_key_fds,
    transitive_right_reduce,
)
from .classify import NormalForm, ViolationLabel, classify_fd, classify_mvd, schema_normal_form
from .diagram import DependencyDiagram, build_diagram, emit_dot, takeout_normalize
from .cookbook import annotate_counts, cookbook_normalize, dedup_rhs
from .verify import (
    brute_force_candidate_keys,
    instance_join_check,
    is_lossless,
    preserves_dependencies,
)
from .quiz import (
    GradeReport,
    Quiz,
    Submission,
    generate_quiz,
    grade_submission,
    parse_submission,
    score_report,
)
from .gift import check_gift, export_gift, parse_gift

__version__ = "0.1.0"

__all__ = [
    "Attribute",
    "AttributeSet",
    "Decomposition",
    "DecomposedTable",
    "DependencyDiagram",
    "ForeignKey",
    "FunctionalDependency",
    "GradeReport",
    "MultivaluedDependency",
    "NormalForm",
    "ParseDiagnostic",
    "ParseError",
    "Quiz",
    "RelationSchema",
    "SchemaError",
    "Submission",
    "ViolationLabel",
    "annotate_counts",
    "attribute_closure",
    "brute_force_candidate_keys",
    "build_diagram",
    "candidate_keys",
    "canonicalize",
    "check_gift",
    "classify_fd",
    "classify_mvd",
    "cookbook_normalize",
    "dedup_rhs",
    "emit_dot",
    "export_gift",
    "generate_quiz",
    "grade_submission",
    "implies",
    "instance_join_check",
    "is_lossless",
    "is_superkey",
    "parse_gift",
    "parse_schema",
    "parse_submission",
    "preserves_dependencies",
    "primary_key",
    "render_schema",
    "schema_normal_form",
    "score_report",
    "suppress_alternative_key_fds",
    "takeout_normalize",
    "transitive_right_reduce",
]

"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 parse error, 3 analysis error
(no key, caps, unsupported input), 4 verification failure (lossy join or a
lost dependency).  Diagnostics go to stderr, results to stdout.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from . import report as report_mod
from .classify import dependency_labels, schema_normal_form
from .cookbook import cookbook_normalize
from .diagram import build_diagram, emit_dot, takeout_normalize
from .dsl import ParseError, parse_schema_with_warnings
from .gift import export_gift
from .inference import attribute_closure, candidate_keys, primary_key
from .model import (
    AttributeSet,
    Decomposition,
    DecomposedTable,
    ForeignKey,
    RelationSchema,
    SchemaError,
)
from .quiz import (
    answer_key_submission,
    generate_quiz,
    grade_submission,
    load_quiz_text,
    parse_submission,
    render_quiz_text,
    render_submission,
)
from .verify import instance_join_check, is_lossless, preserves_dependencies

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_ANALYSIS = 3
EXIT_VERIFY = 4


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # keep argparse from calling sys.exit(2)
        raise _UsageError(message)


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"{path}: error: {exc.strerror or exc}", file=sys.stderr)
        raise _FileError from exc


class _FileError(Exception):
    pass


def _load_schema(path: str) -> RelationSchema:
    text = _read_text(path)
    try:
        schema, warnings = parse_schema_with_warnings(text)
    except ParseError as exc:
        print(f"{path}:{exc.diagnostic.render()}", file=sys.stderr)
        raise
    for warning in warnings:
        print(f"{path}:{warning.render()}", file=sys.stderr)
    return schema


def _attrs_json(attrs: AttributeSet) -> List[str]:
    return list(attrs.names)


def _table_json(table: DecomposedTable) -> dict:
    return {
        "name": table.name,
        "attributes": _attrs_json(table.attributes),
        "pk": _attrs_json(table.pk),
        "fks": [
            {"attributes": _attrs_json(fk.attrs), "references": fk.references}
            for fk in table.fks
        ],
        "provenance": table.provenance,
    }


def _decomposition_json(schema: RelationSchema, method: str, d: Decomposition) -> dict:
    return {
        "schema": schema.name,
        "method": method,
        "tables": [_table_json(t) for t in d.tables],
        "log": list(d.log),
    }


def _load_decomposition(path: str, schema: RelationSchema) -> Decomposition:
    text = _read_text(path)
    try:
        data = json.loads(text)
        tables = []
        for entry in data["tables"]:
            tables.append(
                DecomposedTable(
                    name=entry["name"],
                    attributes=schema.subset(*entry["attributes"]),
                    pk=schema.subset(*entry["pk"]),
                    fks=tuple(
                        ForeignKey(
                            schema.subset(*fk["attributes"]), fk["references"]
                        )
                        for fk in entry.get("fks", [])
                    ),
                    provenance=entry.get("provenance", ""),
                )
            )
        return Decomposition(tables=tuple(tables), log=tuple(data.get("log", [])))
    except (KeyError, TypeError, ValueError, SchemaError) as exc:
        print(f"{path}: error: not a valid decomposition file: {exc}", file=sys.stderr)
        raise _FileError from exc


def _cmd_analyze(args) -> int:
    schema = _load_schema(args.schema)
    keys = candidate_keys(schema)
    key = primary_key(schema)
    closure, trace = attribute_closure(key, schema.fds)
    fd_labels, mvd_labels = dependency_labels(schema)
    nf = schema_normal_form(schema)
    if args.json:
        payload = {
            "schema": schema.name,
            "attributes": [a.name for a in schema.attributes],
            "primary_key": _attrs_json(key),
            "candidate_keys": [_attrs_json(k) for k in keys],
            "key_closure": {
                "result": _attrs_json(closure),
                "steps": [
                    {"added": _attrs_json(step.added), "via": step.justification}
                    for step in trace.steps
                ],
            },
            "fd_labels": [
                {"fd": fd.render(), "label": label.value} for fd, label in fd_labels
            ],
            "mvd_labels": [
                {"mvd": mvd.render(), "label": label.value} for mvd, label in mvd_labels
            ],
            "normal_form": nf.label,
        }
        print(json.dumps(payload, indent=2))
        return EXIT_OK
    print(f"schema {schema.name} ({len(schema.attributes)} attributes)")
    print(f"primary key: {key.render()}")
    print("candidate keys: " + "; ".join(f"{{{k.render()}}}" for k in keys))
    print(f"closure of {{{key.render()}}}:")
    for step in trace.steps:
        print(f"  + {step.added.render():<24} ({step.justification})")
    print("dependency labels:")
    for fd, label in fd_labels:
        print(f"  {fd.render():<40} {label.value}")
    for mvd, label in mvd_labels:
        print(f"  {mvd.render():<40} {label.value}")
    print(f"normal form: {nf.label}")
    return EXIT_OK


def _cmd_decompose(args) -> int:
    schema = _load_schema(args.schema)
    if args.method == "diagram":
        decomposition, _ = takeout_normalize(schema)
    else:
        decomposition = cookbook_normalize(schema)
    if args.json:
        print(json.dumps(_decomposition_json(schema, args.method, decomposition), indent=2))
        return EXIT_OK
    print(f"method: {args.method}")
    for table in decomposition.tables:
        print(table.render())
    if decomposition.log:
        print("log:")
        for line in decomposition.log:
            print(f"  {line}")
    return EXIT_OK


def _cmd_diagram(args) -> int:
    schema = _load_schema(args.schema)
    dot = emit_dot(build_diagram(schema))
    if args.output:
        Path(args.output).write_text(dot, encoding="utf-8")
        print(f"wrote {args.output}")
    else:
        sys.stdout.write(dot)
    return EXIT_OK


def _cmd_verify(args) -> int:
    schema = _load_schema(args.schema)
    if args.decomposition:
        decomposition = _load_decomposition(args.decomposition, schema)
        source = args.decomposition
    else:
        decomposition, _ = takeout_normalize(schema)
        source = "diagram method"
    lossless = is_lossless(schema, decomposition)
    preserved, lost = preserves_dependencies(schema, decomposition)
    joined = instance_join_check(schema, decomposition, seed=args.seed, trials=args.trials)
    print(f"decomposition: {source} ({len(decomposition.tables)} tables)")
    print(f"lossless join: {'yes' if lossless else 'NO'}")
    print(f"instance join check ({args.trials} trials, seed {args.seed}): "
          f"{'agree' if joined else 'DISAGREE'}")
    print(f"dependencies preserved: {'yes' if preserved else 'NO'}")
    for fd in lost:
        print(f"  lost: {fd.render()}")
    if not (lossless and preserved and joined):
        return EXIT_VERIFY
    return EXIT_OK


def _cmd_quiz_gen(args) -> int:
    schema = _load_schema(args.schema)
    quiz = generate_quiz(schema, args.seed)
    outdir = Path(args.output)
    outdir.mkdir(parents=True, exist_ok=True)
    source = _read_text(args.schema)
    (outdir / "quiz.txt").write_text(render_quiz_text(quiz, source), encoding="utf-8")
    (outdir / "quiz.gift").write_text(export_gift(quiz), encoding="utf-8")
    key = render_submission(answer_key_submission(quiz))
    (outdir / "key.txt").write_text(key, encoding="utf-8")
    for name in ("quiz.txt", "quiz.gift", "key.txt"):
        print(f"wrote {outdir / name}")
    return EXIT_OK


def _cmd_quiz_grade(args) -> int:
    quiz = load_quiz_text(_read_text(args.quiz))
    submission = parse_submission(_read_text(args.answers))
    report = grade_submission(quiz, submission, reveal=args.reveal)
    sys.stdout.write(report.render())
    return EXIT_OK


def _cmd_report(args) -> int:
    texts = [_read_text(path) for path in args.grades]
    stats = report_mod.aggregate_grade_files(texts)
    csv_text = report_mod.render_stats_csv(stats)
    sys.stdout.write(csv_text)
    if args.output:
        outdir = Path(args.output)
        outdir.mkdir(parents=True, exist_ok=True)
        (outdir / "report.csv").write_text(csv_text, encoding="utf-8")
        report_mod.save_histogram_figure(stats, outdir / "histogram.png")
        print(f"wrote {outdir / 'report.csv'}")
        print(f"wrote {outdir / 'histogram.png'}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="normkit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="keys, closure trace, violation labels, normal form")
    p.add_argument("schema", help="schema file (.nfs)")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("decompose", help="decompose a schema into normalized tables")
    p.add_argument("--method", choices=("diagram", "cookbook"), required=True)
    p.add_argument("schema")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_decompose)

    p = sub.add_parser("diagram", help="emit the dependency diagram as DOT")
    p.add_argument("schema")
    p.add_argument("-o", "--output", help="output file (default: stdout)")
    p.set_defaults(func=_cmd_diagram)

    p = sub.add_parser("verify", help="check losslessness and dependency preservation")
    p.add_argument("schema")
    p.add_argument("--decomposition", help="decomposition JSON (default: run the diagram method)")
    p.add_argument("--trials", type=int, default=20, help="instance-join trials")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_verify)

    quiz = sub.add_parser("quiz", help="generate or grade quizzes")
    quiz_sub = quiz.add_subparsers(dest="quiz_command", required=True)

    p = quiz_sub.add_parser("gen", help="generate quiz sheet, GIFT export, and answer key")
    p.add_argument("schema")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True, help="output directory")
    p.set_defaults(func=_cmd_quiz_gen)

    p = quiz_sub.add_parser("grade", help="grade an answers file against a quiz sheet")
    p.add_argument("quiz", help="quiz.txt produced by quiz gen")
    p.add_argument("answers", help="answers in Q<k>: ... line format")
    p.add_argument("--reveal", action="store_true", help="include expected answers in feedback")
    p.set_defaults(func=_cmd_quiz_grade)

    p = sub.add_parser("report", help="aggregate grade files: mean, stddev, histogram")
    p.add_argument("grades", nargs="+", help="grade report files")
    p.add_argument("-o", "--output", help="directory for report.csv and histogram.png")
    p.set_defaults(func=_cmd_report)

    return parser


def run(argv: Sequence[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, _FileError):
        return EXIT_PARSE
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()

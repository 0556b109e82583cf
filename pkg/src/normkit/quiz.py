"""Seven-step normalization quizzes: generation, grading, score statistics.

A quiz walks the solver through the full procedure: recognize the
dependencies, find the primary key, label the violations, name the schema's
normal form, decompose, assign table keys, and spot the foreign keys.
Everything is derived from the schema and a seed; equal inputs give byte
identical quizzes.
"""

from __future__ import annotations

import random
import statistics
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from .model import (
    Attribute,
    AttributeSet,
    Decomposition,
    FunctionalDependency,
    RelationSchema,
    SchemaError,
)
from .inference import implies, primary_key, _close, _pairs
from .classify import dependency_labels, schema_normal_form
from .diagram import takeout_normalize


class UnknownOptionError(SchemaError):
    """A submission references an option id the quiz does not have."""


class QuizMismatchError(SchemaError):
    """A submission references a different quiz."""


class SubmissionError(SchemaError):
    """A submission file is malformed."""


class EmptyInputError(SchemaError):
    """Statistics over an empty list of reports."""


STEP_TITLES = {
    1: "dependency recognition",
    2: "primary key determination",
    3: "violated normal forms",
    4: "schema normal form",
    5: "decomposition",
    6: "table primary keys",
    7: "foreign keys",
}

_IDS = "abcdefghijklmnopqrstuvwxyz"

MatchKey = Tuple[Tuple[str, str], ...]
AnswerKey = Union[frozenset, str, MatchKey]


@dataclass(frozen=True)
class QuizQuestion:
    step: int
    kind: str  # "multi" | "single" | "match"
    stem: str
    options: Tuple[Tuple[str, str], ...]  # (id, text); rows for match questions
    key: AnswerKey
    match_values: Tuple[str, ...] = ()

    @property
    def option_ids(self) -> frozenset:
        return frozenset(oid for oid, _ in self.options)


@dataclass(frozen=True)
class Quiz:
    schema_name: str
    seed: int
    questions: Tuple[QuizQuestion, ...]

    def question(self, step: int) -> QuizQuestion:
        return self.questions[step - 1]


@dataclass(frozen=True)
class Submission:
    answers: Mapping[int, Union[Tuple[str, ...], MatchKey]]
    quiz_name: Optional[str] = None
    seed: Optional[int] = None


@dataclass(frozen=True)
class GradeReport:
    quiz_name: str
    seed: int
    scores: Tuple[int, ...]
    feedback: Tuple[str, ...]

    @property
    def total(self) -> int:
        return sum(self.scores)

    def render(self) -> str:
        lines = [f"quiz: {self.quiz_name}", f"seed: {self.seed}"]
        for step, text in enumerate(self.feedback, start=1):
            lines.append(f"q{step}: {text}")
        lines.append(f"total: {self.total}/{len(self.scores)}")
        return "\n".join(lines) + "\n"


def _ordered(attrs) -> List[Attribute]:
    return sorted(attrs, key=lambda a: a.ordinal)


def _sample(rng: random.Random, pool: Sequence, k: int) -> List:
    return rng.sample(list(pool), k) if k <= len(pool) else list(pool)


def _fd_distractors(
    schema: RelationSchema, rng: random.Random
) -> Tuple[List[FunctionalDependency], List[AttributeSet]]:
    """Invent plausible but false dependencies: a merged determinant with an
    unreachable right side, a true FD padded with an unreachable attribute,
    and a reversed FD.  Every distractor is checked to not be implied by the
    declared FDs."""
    fds = schema.fds
    everything = schema.all_attributes.members
    pairs = _pairs(fds)
    out: List[FunctionalDependency] = []
    merged_lhs: List[AttributeSet] = []

    if len(fds) >= 2:
        for _ in range(4):
            first, second = _sample(rng, range(len(fds)), 2)
            lhs = fds[first].lhs | fds[second].lhs
            pool = _ordered(everything - _close(lhs.members, pairs))
            if not pool:
                continue
            rhs = AttributeSet.of(_sample(rng, pool, min(2, len(pool))))
            candidate = FunctionalDependency(lhs, rhs)
            if not implies(fds, candidate):
                out.append(candidate)
                merged_lhs.append(lhs)
                break
    if fds:
        for _ in range(4):
            base = fds[rng.randrange(len(fds))]
            pool = _ordered(everything - _close(base.lhs.members, pairs))
            if not pool:
                continue
            extra = pool[rng.randrange(len(pool))]
            candidate = FunctionalDependency(
                base.lhs, AttributeSet(base.rhs.members | {extra})
            )
            if not implies(fds, candidate):
                out.append(candidate)
                break
    if fds:
        for _ in range(4):
            base = fds[rng.randrange(len(fds))]
            reversed_fd = FunctionalDependency(base.rhs, base.lhs)
            if not implies(fds, reversed_fd):
                out.append(reversed_fd)
                break

    texts = set()
    unique = []
    for fd in out:
        if fd.display() not in texts:
            texts.add(fd.display())
            unique.append(fd)
    return unique, merged_lhs


def _letters(payloads: Sequence[str]) -> Tuple[Tuple[str, str], ...]:
    return tuple((_IDS[i], text) for i, text in enumerate(payloads))


def _table_text(name: str, attrs: AttributeSet) -> str:
    return f"{name} ({attrs.render()})"


def _pk_token(pk: AttributeSet) -> str:
    return "+".join(pk.names)


def generate_quiz(schema: RelationSchema, seed: int) -> Quiz:
    """Build the seven-question series for a schema.

    All randomness (distractor choice, option shuffling) comes from the seed.
    """
    rng = random.Random(seed)
    key = primary_key(schema)
    fd_labels, _ = dependency_labels(schema)
    decomposition, _ = takeout_normalize(schema)
    attrs_text = schema.all_attributes.render()
    questions: List[QuizQuestion] = []

    # step 1: pick out the dependencies that really hold
    true_deps = [dep.display() for dep in schema.dependencies()]
    distractors, merged_lhs = _fd_distractors(schema, rng)
    payloads = true_deps + [fd.display() for fd in distractors]
    rng.shuffle(payloads)
    options = _letters(payloads)
    questions.append(
        QuizQuestion(
            step=1,
            kind="multi",
            stem=(
                f"Which of the following dependencies hold in the table "
                f"{schema.name} ({attrs_text})?"
            ),
            options=options,
            key=frozenset(oid for oid, text in options if text in set(true_deps)),
        )
    )

    # step 2: the primary key among decoy attribute sets
    decoys: List[AttributeSet] = []
    for fd in schema.fds:
        decoys.append(fd.lhs)
    for attr in key:
        decoys.append(AttributeSet.of([attr]))
    decoys.extend(merged_lhs)
    seen = {key.members}
    payloads = [key.render()]
    for decoy in decoys:
        if decoy.members not in seen:
            seen.add(decoy.members)
            payloads.append(decoy.render())
    rng.shuffle(payloads)
    options = _letters(payloads)
    questions.append(
        QuizQuestion(
            step=2,
            kind="single",
            stem=(
                f"Given the dependencies above, what is the primary key of "
                f"{schema.name}?"
            ),
            options=options,
            key=next(oid for oid, text in options if text == key.render()),
        )
    )

    # step 3: match each FD with the normal form it violates
    rows = _letters([fd.display() for fd, _ in fd_labels])
    labels = tuple(label.value for _, label in fd_labels)
    questions.append(
        QuizQuestion(
            step=3,
            kind="match",
            stem="Match each functional dependency with the normal form it violates.",
            options=rows,
            key=tuple((rows[i][0], labels[i]) for i in range(len(rows))),
            match_values=("2NF", "3NF", "BCNF", "4NF", "none"),
        )
    )

    # step 4: the schema's normal form before decomposition
    nf = schema_normal_form(schema).label
    forms = ("not in first normal form", "1NF", "2NF", "3NF", "BCNF", "4NF")
    options = _letters(forms)
    questions.append(
        QuizQuestion(
            step=4,
            kind="single",
            stem=f"In which normal form is {schema.name} before the decomposition?",
            options=options,
            key=next(oid for oid, text in options if text == nf),
        )
    )

    # step 5: the decomposed tables, plus decoys missing one foreign-key column
    true_tables = [_table_text(t.name, t.attributes) for t in decomposition.tables]
    decoy_tables: List[str] = []
    droppable = []
    for table in decomposition.tables:
        fk_attrs = set()
        for fk in table.fks:
            fk_attrs.update(fk.attrs.members)
        for attr in _ordered(fk_attrs - table.pk.members):
            droppable.append((table, attr))
    for table, attr in _sample(rng, droppable, min(2, len(droppable))):
        decoy_tables.append(_table_text(table.name, table.attributes.without(attr)))
    payloads = true_tables + decoy_tables
    rng.shuffle(payloads)
    options = _letters(payloads)
    questions.append(
        QuizQuestion(
            step=5,
            kind="multi",
            stem=f"Onto which tables should {schema.name} be decomposed?",
            options=options,
            key=frozenset(oid for oid, text in options if text in set(true_tables)),
        )
    )

    # step 6: match each table with its primary key
    rows = _letters([t.name for t in decomposition.tables])
    tokens = [_pk_token(t.pk) for t in decomposition.tables]
    shown = sorted(set(tokens))
    rng.shuffle(shown)
    questions.append(
        QuizQuestion(
            step=6,
            kind="match",
            stem="Match each decomposed table with its primary key.",
            options=rows,
            key=tuple((rows[i][0], tokens[i]) for i in range(len(rows))),
            match_values=tuple(shown),
        )
    )

    # step 7: which attributes also serve as foreign keys
    fk_attrs: set = set()
    for table in decomposition.tables:
        for fk in table.fks:
            fk_attrs.update(fk.attrs.members)
    fk_list = _ordered(fk_attrs)
    non_fk = _ordered(schema.all_attributes.members - fk_attrs)
    payloads = [a.name for a in fk_list]
    payloads += [a.name for a in _sample(rng, non_fk, min(2, len(non_fk)))]
    if not fk_list:
        payloads.append("none of the attributes")
    rng.shuffle(payloads)
    options = _letters(payloads)
    if fk_list:
        answer = frozenset(
            oid for oid, text in options if text in {a.name for a in fk_list}
        )
    else:
        answer = frozenset(
            oid for oid, text in options if text == "none of the attributes"
        )
    questions.append(
        QuizQuestion(
            step=7,
            kind="multi",
            stem=(
                "Which attributes also appear as foreign keys in the "
                "decomposed tables?"
            ),
            options=options,
            key=answer,
        )
    )

    return Quiz(schema_name=schema.name, seed=seed, questions=tuple(questions))


def grade_submission(
    quiz: Quiz, submission: Submission, reveal: bool = False
) -> GradeReport:
    """Exact-match grading: one point per question whose selection equals the
    answer key.  Feedback names the step; with ``reveal`` it includes the key.
    """
    if submission.quiz_name is not None and submission.quiz_name != quiz.schema_name:
        raise QuizMismatchError(
            f"submission is for {submission.quiz_name!r}, quiz is {quiz.schema_name!r}"
        )
    if submission.seed is not None and submission.seed != quiz.seed:
        raise QuizMismatchError(
            f"submission is for seed {submission.seed}, quiz used seed {quiz.seed}"
        )
    scores: List[int] = []
    feedback: List[str] = []
    for question in quiz.questions:
        title = STEP_TITLES[question.step]
        answer = submission.answers.get(question.step)
        correct = False
        if answer is None:
            feedback.append(f"not answered ({title})")
            scores.append(0)
            continue
        if question.kind == "match":
            if not answer or not all(
                isinstance(item, tuple) and len(item) == 2 for item in answer
            ):
                raise SubmissionError(
                    f"Q{question.step} expects row=value pairs"
                )
            for row_id, _ in answer:
                if row_id not in question.option_ids:
                    raise UnknownOptionError(
                        f"Q{question.step}: unknown row {row_id!r}"
                    )
            correct = dict(answer) == dict(question.key)
        else:
            if not all(isinstance(item, str) for item in answer):
                raise SubmissionError(f"Q{question.step} expects option ids")
            for oid in answer:
                if oid not in question.option_ids:
                    raise UnknownOptionError(
                        f"Q{question.step}: unknown option {oid!r}"
                    )
            if question.kind == "multi":
                correct = frozenset(answer) == question.key
            else:
                correct = len(answer) == 1 and answer[0] == question.key
        scores.append(1 if correct else 0)
        if correct:
            feedback.append(f"correct ({title})")
        elif reveal:
            feedback.append(f"incorrect ({title}); expected {_render_key(question)}")
        else:
            feedback.append(f"incorrect ({title})")
    return GradeReport(
        quiz_name=quiz.schema_name,
        seed=quiz.seed,
        scores=tuple(scores),
        feedback=tuple(feedback),
    )


def _render_key(question: QuizQuestion) -> str:
    if question.kind == "multi":
        return ",".join(sorted(question.key))
    if question.kind == "single":
        return question.key
    return ", ".join(f"{row}={value}" for row, value in question.key)


def answer_key_submission(quiz: Quiz) -> Submission:
    """The quiz's own answer key as a gradable submission."""
    answers: Dict[int, Union[Tuple[str, ...], MatchKey]] = {}
    for question in quiz.questions:
        if question.kind == "multi":
            answers[question.step] = tuple(sorted(question.key))
        elif question.kind == "single":
            answers[question.step] = (question.key,)
        else:
            answers[question.step] = question.key
    return Submission(answers=answers, quiz_name=quiz.schema_name, seed=quiz.seed)


def render_submission(submission: Submission) -> str:
    """Line format: ``Q<k>: id,id`` or ``Q<k>: row=value, row=value``."""
    lines = []
    if submission.quiz_name is not None:
        lines.append(f"quiz: {submission.quiz_name}")
    if submission.seed is not None:
        lines.append(f"seed: {submission.seed}")
    for step in sorted(submission.answers):
        answer = submission.answers[step]
        if answer and isinstance(answer[0], tuple):
            body = ", ".join(f"{row}={value}" for row, value in answer)
        else:
            body = ", ".join(answer)
        lines.append(f"Q{step}: {body}")
    return "\n".join(lines) + "\n"


def parse_submission(text: str) -> Submission:
    """Parse the line-based answer format (see render_submission)."""
    answers: Dict[int, Union[Tuple[str, ...], MatchKey]] = {}
    quiz_name: Optional[str] = None
    seed: Optional[int] = None
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.lower().startswith("quiz:"):
            quiz_name = line.split(":", 1)[1].strip()
            continue
        if line.lower().startswith("seed:"):
            try:
                seed = int(line.split(":", 1)[1].strip())
            except ValueError as exc:
                raise SubmissionError(f"line {lineno}: bad seed") from exc
            continue
        if ":" not in line:
            raise SubmissionError(f"line {lineno}: expected 'Q<n>: ...'")
        head, body = line.split(":", 1)
        head = head.strip()
        if not head.upper().startswith("Q"):
            raise SubmissionError(f"line {lineno}: expected 'Q<n>: ...'")
        try:
            step = int(head[1:])
        except ValueError as exc:
            raise SubmissionError(f"line {lineno}: bad question number") from exc
        if step in answers:
            raise SubmissionError(f"line {lineno}: duplicate answer for Q{step}")
        items = [part.strip() for part in body.split(",") if part.strip()]
        if any("=" in item for item in items):
            pairs = []
            for item in items:
                if "=" not in item:
                    raise SubmissionError(
                        f"line {lineno}: mixing ids and row=value pairs"
                    )
                row, value = item.split("=", 1)
                pairs.append((row.strip(), value.strip()))
            answers[step] = tuple(pairs)
        else:
            answers[step] = tuple(items)
    return Submission(answers=answers, quiz_name=quiz_name, seed=seed)


@dataclass(frozen=True)
class ScoreStats:
    count: int
    mean: float
    stddev: float
    histogram: Tuple[int, ...]


def score_report(reports: Sequence[GradeReport]) -> ScoreStats:
    """Mean, sample standard deviation (n-1), and a 0..7 histogram of totals."""
    if not reports:
        raise EmptyInputError("no grade reports given")
    totals = [report.total for report in reports]
    histogram = [0] * 8
    for total in totals:
        histogram[max(0, min(7, total))] += 1
    stddev = statistics.stdev(totals) if len(totals) > 1 else 0.0
    return ScoreStats(
        count=len(totals),
        mean=float(statistics.mean(totals)),
        stddev=float(stddev),
        histogram=tuple(histogram),
    )


def render_quiz_text(quiz: Quiz, schema_source: str) -> str:
    """Printable quiz sheet with a commented, machine-readable preamble.

    The preamble embeds the schema source and seed, so the file alone is
    enough to regenerate the quiz (generation is deterministic) when grading.
    """
    lines = ["# normkit quiz", f"# seed: {quiz.seed}", "# schema-begin"]
    for source_line in schema_source.rstrip("\n").split("\n"):
        lines.append(f"# {source_line}")
    lines.append("# schema-end")
    lines.append("")
    lines.append(f"Quiz: {quiz.schema_name} (seed {quiz.seed})")
    for question in quiz.questions:
        lines.append("")
        lines.append(f"Q{question.step}. {question.stem}")
        for oid, text in question.options:
            lines.append(f"  {oid}) {text}")
        if question.kind == "match":
            lines.append("  values: " + " | ".join(question.match_values))
        elif question.kind == "multi":
            lines.append("  (select every option that applies)")
    return "\n".join(lines) + "\n"


def load_quiz_text(text: str) -> Quiz:
    """Regenerate a quiz from a sheet produced by render_quiz_text."""
    from .dsl import parse_schema

    seed: Optional[int] = None
    schema_lines: List[str] = []
    in_schema = False
    for raw in text.split("\n"):
        line = raw.strip()
        if line.startswith("# seed:"):
            seed = int(line.split(":", 1)[1].strip())
        elif line == "# schema-begin":
            in_schema = True
        elif line == "# schema-end":
            in_schema = False
        elif in_schema and line.startswith("#"):
            schema_lines.append(line[1:].lstrip())
    if seed is None or not schema_lines:
        raise SubmissionError(
            "quiz sheet is missing its machine-readable preamble"
        )
    schema = parse_schema("\n".join(schema_lines) + "\n")
    return generate_quiz(schema, seed)

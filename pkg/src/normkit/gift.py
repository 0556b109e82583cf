"""GIFT export for quizzes, plus a small structural parser used to check
that exported text is well formed.

Conventions: multi-select options are written ``=%w%text`` for correct
options (weights sum to 100) and ``~%-w%text`` for wrong ones; single-choice
questions use plain ``=``/``~`` prefixes; matching questions use
``=left -> right`` pairs.  The characters ``~ = # { } :`` are escaped with a
backslash.  Questions are separated by one blank line.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal
from typing import List, Optional, Tuple

from .model import SchemaError
from .quiz import Quiz, QuizQuestion, STEP_TITLES

_SPECIALS = "~=#{}:"


class GiftFormatError(SchemaError):
    """Exported text failed the structural check."""


def escape(text: str) -> str:
    out = []
    for ch in text:
        if ch in _SPECIALS:
            out.append("\\")
        out.append(ch)
    return "".join(out)


def unescape(text: str) -> str:
    out = []
    i = 0
    while i < len(text):
        if text[i] == "\\" and i + 1 < len(text) and text[i + 1] in _SPECIALS:
            out.append(text[i + 1])
            i += 2
        else:
            out.append(text[i])
            i += 1
    return "".join(out)


def _format_weight(value: Decimal) -> str:
    text = format(value.normalize(), "f")
    return text


def _weights(count: int) -> List[str]:
    """Percentages for ``count`` options, summing to exactly 100."""
    share = (Decimal(100) / count).quantize(Decimal("0.00001"))
    weights = [share] * (count - 1)
    weights.append(Decimal(100) - share * (count - 1))
    return [_format_weight(w) for w in weights]


def _question_block(question: QuizQuestion) -> str:
    title = escape(f"Q{question.step} {STEP_TITLES[question.step]}")
    lines = [f"::{title}:: {escape(question.stem)} {{"]
    if question.kind == "match":
        for row_id, row_text in question.options:
            value = dict(question.key)[row_id]
            lines.append(f"  ={escape(row_text)} -> {escape(value)}")
    elif question.kind == "single":
        for oid, text in question.options:
            prefix = "=" if oid == question.key else "~"
            lines.append(f"  {prefix}{escape(text)}")
    else:
        correct = [oid for oid, _ in question.options if oid in question.key]
        wrong = [oid for oid, _ in question.options if oid not in question.key]
        if len(correct) == len(question.options) == 1:
            lines.append(f"  ={escape(question.options[0][1])}")
        else:
            by_id = dict(question.options)
            plus = _weights(len(correct))
            minus = _weights(len(wrong)) if wrong else []
            for oid, text in question.options:
                if oid in question.key:
                    weight = plus[correct.index(oid)]
                    lines.append(f"  =%{weight}%{escape(by_id[oid])}")
                else:
                    weight = minus[wrong.index(oid)]
                    lines.append(f"  ~%-{weight}%{escape(by_id[oid])}")
    lines.append("}")
    return "\n".join(lines)


def export_gift(quiz: Quiz) -> str:
    """Render all seven questions as GIFT text."""
    return "\n\n".join(_question_block(q) for q in quiz.questions) + "\n"


@dataclass
class GiftOption:
    correct: bool
    weight: Optional[float]
    text: str
    match_right: Optional[str] = None


@dataclass
class GiftQuestion:
    title: str
    stem: str
    options: List[GiftOption] = field(default_factory=list)

    @property
    def is_matching(self) -> bool:
        return any(o.match_right is not None for o in self.options)


def _split_unescaped(body: str, separators: str) -> List[Tuple[str, int]]:
    """Positions of unescaped separator characters."""
    positions = []
    i = 0
    while i < len(body):
        if body[i] == "\\":
            i += 2
            continue
        if body[i] in separators:
            positions.append((body[i], i))
        i += 1
    return positions


def parse_gift(text: str) -> List[GiftQuestion]:
    """Structural parse of GIFT text: titles, stems, options, weights."""
    blocks: List[str] = []
    current: List[str] = []
    depth = 0
    for line in text.split("\n"):
        stripped = line.strip()
        if not stripped and depth == 0:
            if current:
                blocks.append("\n".join(current))
                current = []
            continue
        current.append(line)
        i = 0
        while i < len(stripped):
            if stripped[i] == "\\":
                i += 2
                continue
            if stripped[i] == "{":
                depth += 1
            elif stripped[i] == "}":
                depth -= 1
            i += 1
    if current:
        blocks.append("\n".join(current))

    questions = []
    for block in blocks:
        flat = " ".join(part.strip() for part in block.split("\n"))
        if not flat.startswith("::"):
            raise GiftFormatError("question must start with ::title::")
        title_end = flat.find("::", 2)
        if title_end < 0:
            raise GiftFormatError("unterminated ::title::")
        title = unescape(flat[2:title_end])
        rest = flat[title_end + 2 :].strip()
        brace_positions = [p for ch, p in _split_unescaped(rest, "{}")]
        if len(brace_positions) < 2:
            raise GiftFormatError(f"question {title!r} has no answer block")
        open_pos, close_pos = brace_positions[0], brace_positions[-1]
        stem = unescape(rest[:open_pos].strip())
        body = rest[open_pos + 1 : close_pos].strip()
        question = GiftQuestion(title=title, stem=stem)
        marks = [
            (ch, pos)
            for ch, pos in _split_unescaped(body, "=~")
            if pos == 0 or body[pos - 1].isspace()
        ]
        if not marks:
            raise GiftFormatError(f"question {title!r} has no options")
        for index, (ch, pos) in enumerate(marks):
            end = marks[index + 1][1] if index + 1 < len(marks) else len(body)
            chunk = body[pos + 1 : end].strip()
            weight = None
            if chunk.startswith("%"):
                weight_end = chunk.find("%", 1)
                if weight_end < 0:
                    raise GiftFormatError(f"question {title!r}: unterminated weight")
                weight = float(chunk[1:weight_end])
                chunk = chunk[weight_end + 1 :].strip()
            match_right = None
            if ch == "=" and " -> " in chunk:
                chunk, match_right = chunk.split(" -> ", 1)
                match_right = unescape(match_right.strip())
                chunk = chunk.strip()
            question.options.append(
                GiftOption(
                    correct=(ch == "="),
                    weight=weight,
                    text=unescape(chunk),
                    match_right=match_right,
                )
            )
        questions.append(question)
    return questions


def check_gift(text: str) -> List[GiftQuestion]:
    """Parse and validate: every question has options; weighted questions
    have positive weights on correct options summing to about 100 and
    negative weights on wrong options."""
    questions = parse_gift(text)
    for question in questions:
        if not question.options:
            raise GiftFormatError(f"question {question.title!r} has no options")
        weighted = [o for o in question.options if o.weight is not None]
        if weighted:
            positive = sum(o.weight for o in weighted if o.correct)
            if abs(positive - 100.0) > 0.01:
                raise GiftFormatError(
                    f"question {question.title!r}: correct weights sum to {positive}"
                )
            for option in weighted:
                if not option.correct and option.weight >= 0:
                    raise GiftFormatError(
                        f"question {question.title!r}: wrong option with nonnegative weight"
                    )
    return questions

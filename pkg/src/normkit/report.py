"""Aggregate grade reports: delimited summary output and a histogram figure."""

from __future__ import annotations

import re
from pathlib import Path
from typing import List, Sequence, Union

from .quiz import GradeReport, ScoreStats, SubmissionError, score_report

_Q_LINE = re.compile(r"^q(\d+):\s*(.*)$")


def parse_grade_file(text: str) -> GradeReport:
    """Read back a grade report written by GradeReport.render()."""
    quiz_name = None
    seed = 0
    scores: dict[int, int] = {}
    feedback: dict[int, str] = {}
    total_line = None
    for raw in text.split("\n"):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("quiz:"):
            quiz_name = line.split(":", 1)[1].strip()
            continue
        if line.startswith("seed:"):
            seed = int(line.split(":", 1)[1].strip())
            continue
        if line.startswith("total:"):
            total_line = line.split(":", 1)[1].strip()
            continue
        match = _Q_LINE.match(line)
        if match:
            step = int(match.group(1))
            text_part = match.group(2)
            scores[step] = 1 if text_part.startswith("correct") else 0
            feedback[step] = text_part
    if quiz_name is None or not scores:
        raise SubmissionError("not a grade report: missing quiz name or question lines")
    steps = sorted(scores)
    report = GradeReport(
        quiz_name=quiz_name,
        seed=seed,
        scores=tuple(scores[s] for s in steps),
        feedback=tuple(feedback[s] for s in steps),
    )
    if total_line is not None:
        claimed = int(total_line.split("/", 1)[0])
        if claimed != report.total:
            raise SubmissionError(
                f"grade report total {claimed} disagrees with its question lines"
            )
    return report


def render_stats_csv(stats: ScoreStats) -> str:
    """Delimited summary: one metric per row, then the histogram buckets."""
    lines = ["metric,value"]
    lines.append(f"count,{stats.count}")
    lines.append(f"mean,{stats.mean:.4f}")
    lines.append(f"stddev,{stats.stddev:.4f}")
    for score, bucket in enumerate(stats.histogram):
        lines.append(f"score_{score},{bucket}")
    return "\n".join(lines) + "\n"


def save_histogram_figure(stats: ScoreStats, path: Union[str, Path]) -> None:
    """Render the score histogram to an image file."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    scores = list(range(len(stats.histogram)))
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(scores, stats.histogram, color="#4878a8", edgecolor="black")
    ax.set_xlabel("score")
    ax.set_ylabel("submissions")
    ax.set_title(f"score distribution (n={stats.count}, mean={stats.mean:.2f})")
    ax.set_xticks(scores)
    ax.yaxis.get_major_locator().set_params(integer=True)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def aggregate_grade_files(texts: Sequence[str]) -> ScoreStats:
    reports: List[GradeReport] = [parse_grade_file(text) for text in texts]
    return score_report(reports)

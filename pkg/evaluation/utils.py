"""General utilities for evaluation."""

import re
from typing import Any, List, Optional, Tuple

from engine.stream_engine import RunReport


def slugify_run_name(name: str) -> str:
    """Convert a run name to a slug usable in artifact paths."""
    base = name or "run"
    slug = re.sub(r"[^a-z0-9_.-]+", "-", base.lower()).strip("-")
    return slug or "run"


def normalize_h_sweep(sweep: Any) -> List[float]:
    """Normalize the configured branch cuts to a descending list of floats."""
    if sweep is None:
        return []
    if isinstance(sweep, (int, float)):
        return [float(sweep)]
    values: List[float] = []
    for item in sweep:
        try:
            values.append(float(item))
        except (TypeError, ValueError):
            print(f"⚠ Ignoring invalid branch cut entry: {item}")
    return sorted(set(values), reverse=True)


def cumulative_curve(report: RunReport, every: int) -> List[Tuple[int, int, float]]:
    """(objects processed, cumulative comparisons, cumulative seconds) every ``every`` objects."""
    if every < 1:
        raise ValueError("sampling interval must be positive")
    curve = [
        (s.step, s.cumulative_comparisons, s.cumulative_time_s)
        for s in report.steps
        if s.step % every == 0
    ]
    if report.steps and report.steps[-1].step % every:
        last = report.steps[-1]
        curve.append((last.step, last.cumulative_comparisons, last.cumulative_time_s))
    return curve


def comparison_ratio(reference: RunReport, candidate: RunReport) -> Optional[float]:
    """How many times fewer comparisons ``candidate`` needed than ``reference``."""
    if candidate.total_comparisons == 0:
        return None
    return reference.total_comparisons / candidate.total_comparisons

"""Accuracy of approximate target sets against exact ones."""

import os
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict
from sklearn.metrics import confusion_matrix

from engine.core.errors import SchemaMismatch
from engine.core.preference import Dominance, UserProfile, dominates
from engine.core.schema import ObjectRecord


class UserAccuracy(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    user_id: str
    exact_size: int
    approx_size: int
    overlap: int
    true_negatives: int
    precision: Fraction
    recall: Fraction
    accuracy: Fraction
    f_measure: Fraction


class AccuracyReport(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    users: List[UserAccuracy]
    precision: Fraction
    recall: Fraction
    accuracy: Fraction
    f_measure: Fraction
    universe_size: int


def _ratio(numerator: int, denominator: int) -> Fraction:
    # an empty denominator makes the metric vacuously perfect
    return Fraction(numerator, denominator) if denominator else Fraction(1)


def f_measure(precision: Fraction, recall: Fraction) -> Fraction:
    if precision + recall == 0:
        return Fraction(0)
    return 2 * precision * recall / (precision + recall)


def _confusion(universe: Sequence[str], exact: Iterable[str], approx: Iterable[str]):
    exact_set, approx_set = set(exact), set(approx)
    if not universe:
        return 0, 0, 0, 0
    y_true = np.fromiter((o in exact_set for o in universe), dtype=bool, count=len(universe))
    y_pred = np.fromiter((o in approx_set for o in universe), dtype=bool, count=len(universe))
    tn, fp, fn, tp = confusion_matrix(y_true, y_pred, labels=[False, True]).ravel()
    return int(tn), int(fp), int(fn), int(tp)


def accuracy_metrics(
    exact: Mapping[str, Iterable[str]],
    approx: Mapping[str, Iterable[str]],
    *,
    universe: Optional[Sequence[str]] = None,
) -> AccuracyReport:
    """Per-user and aggregate precision, recall, accuracy and F-measure.

    Aggregates pool the confusion counts of every user. ``universe`` is the
    object set the frontiers were drawn from; without it the union of all
    frontiers stands in, which only affects the accuracy column.
    """
    if set(exact) != set(approx):
        raise SchemaMismatch(
            f"exact and approximate runs cover different users: {sorted(set(exact) ^ set(approx))}"
        )
    exact = {u: set(v) for u, v in exact.items()}
    approx = {u: set(v) for u, v in approx.items()}
    if universe is None:
        pooled = set().union(*exact.values(), *approx.values()) if exact else set()
        universe = sorted(pooled)
    else:
        universe = list(universe)
        outside = set().union(*exact.values(), *approx.values()) - set(universe) if exact else set()
        if outside:
            raise SchemaMismatch(f"frontier objects outside the universe: {sorted(outside)}")

    rows: List[UserAccuracy] = []
    totals = np.zeros(4, dtype=np.int64)
    for user_id in exact:
        tn, fp, fn, tp = _confusion(universe, exact[user_id], approx[user_id])
        totals += (tn, fp, fn, tp)
        precision, recall = _ratio(tp, tp + fp), _ratio(tp, tp + fn)
        rows.append(UserAccuracy(
            user_id=user_id,
            exact_size=tp + fn,
            approx_size=tp + fp,
            overlap=tp,
            true_negatives=tn,
            precision=precision,
            recall=recall,
            accuracy=_ratio(tp + tn, tn + fp + fn + tp),
            f_measure=f_measure(precision, recall),
        ))
    tn, fp, fn, tp = (int(x) for x in totals)
    precision, recall = _ratio(tp, tp + fp), _ratio(tp, tp + fn)
    return AccuracyReport(
        users=rows,
        precision=precision,
        recall=recall,
        accuracy=_ratio(tp + tn, tn + fp + fn + tp),
        f_measure=f_measure(precision, recall),
        universe_size=len(universe),
    )


def accuracy_frame(report: AccuracyReport) -> pd.DataFrame:
    frame = pd.DataFrame(
        [
            {
                "user_id": row.user_id,
                "exact_size": row.exact_size,
                "approx_size": row.approx_size,
                "overlap": row.overlap,
                "precision": float(row.precision),
                "recall": float(row.recall),
                "f_measure": float(row.f_measure),
                "accuracy": float(row.accuracy),
            }
            for row in report.users
        ],
        columns=["user_id", "exact_size", "approx_size", "overlap", "precision", "recall", "f_measure", "accuracy"],
    )
    aggregate = {
        "user_id": "ALL",
        "exact_size": int(frame["exact_size"].sum()),
        "approx_size": int(frame["approx_size"].sum()),
        "overlap": int(frame["overlap"].sum()),
        "precision": float(report.precision),
        "recall": float(report.recall),
        "f_measure": float(report.f_measure),
        "accuracy": float(report.accuracy),
    }
    return pd.concat([frame, pd.DataFrame([aggregate])], ignore_index=True)


def write_accuracy_csv(report: AccuracyReport, path: str) -> str:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    accuracy_frame(report).to_csv(path, index=False, float_format="%.4f")
    return path


def audit_false_positives(
    exact: Mapping[str, Iterable[str]],
    approx: Mapping[str, Iterable[str]],
    objects: Mapping[str, ObjectRecord],
    users: Mapping[str, UserProfile],
) -> Dict[str, int]:
    """Check that every exact dominator of a false positive is itself missed.

    Returns counts of audited false positives and of violations; a violation
    is a false positive ``o`` for user ``c`` with some ``o'`` in both the exact
    and approximate frontiers of ``c`` that dominates ``o`` under ``c``.
    """
    audited = violations = 0
    for user_id, exact_ids in exact.items():
        exact_set, approx_set = set(exact_ids), set(approx[user_id])
        profile = users[user_id]
        for object_id in approx_set - exact_set:
            audited += 1
            o = objects[object_id]
            for dominator_id in exact_set:
                if dominates(objects[dominator_id], o, profile) is Dominance.DOMINATES and dominator_id in approx_set:
                    violations += 1
                    break
    return {"false_positives": audited, "violations": violations}

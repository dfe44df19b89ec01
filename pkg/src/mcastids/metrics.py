"""Confusion-matrix construction and classification metrics.

Evaluation is per packet and binary: a record counts as positive iff
its label set is non-empty, on both the truth and the prediction side.
Rates with a zero denominator are defined as 0, and MCC with any zero
margin is defined as 0.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import EvalError
from .rulebook import TrainingLevel


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    tn: int
    fp: int
    fn: int

    def __post_init__(self):
        for name in ("tp", "tn", "fp", "fn"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 0:
                raise ValueError(f"{name} must be a non-negative integer, got {v!r}")

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn


@dataclass(frozen=True)
class MetricsReport:
    tpr: float
    fpr: float
    fnr: float
    precision: float
    accuracy: float
    f1: float
    markedness: float
    informedness: float
    mcc: float
    matrix: ConfusionMatrix

    _FIELDS = ("tpr", "fpr", "fnr", "precision", "accuracy", "f1", "markedness", "informedness", "mcc")

    _BLURBS = {
        "tpr": "share of anomalous records that were flagged",
        "fpr": "share of normal records that were flagged",
        "fnr": "share of anomalous records that slipped through",
        "precision": "share of flagged records that are truly anomalous",
        "accuracy": "share of records classified correctly",
        "f1": "harmonic mean of precision and TPR",
        "markedness": "prediction consistency over both classes",
        "informedness": "probability of an informed (non-chance) decision",
        "mcc": "correlation between truth and prediction",
    }

    def to_json_dict(self) -> dict:
        out: dict = {name: round(getattr(self, name), 4) for name in self._FIELDS}
        cm = self.matrix
        out["counts"] = {"tp": cm.tp, "tn": cm.tn, "fp": cm.fp, "fn": cm.fn}
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2)

    def to_table(self) -> str:
        cm = self.matrix
        rows = [
            ("TP", "anomalous records flagged", str(cm.tp)),
            ("TN", "normal records passed", str(cm.tn)),
            ("FP", "normal records flagged", str(cm.fp)),
            ("FN", "anomalous records missed", str(cm.fn)),
        ]
        rows += [
            (name.upper() if name != "mcc" else "MCC", self._BLURBS[name], f"{getattr(self, name):.4f}")
            for name in self._FIELDS
        ]
        name_w = max(len(r[0]) for r in rows)
        desc_w = max(len(r[1]) for r in rows)
        lines = [f"{'Metric':<{name_w}}  {'Description':<{desc_w}}  Value"]
        lines += [f"{n:<{name_w}}  {d:<{desc_w}}  {v}" for n, d, v in rows]
        return "\n".join(lines)


def confusion(
    truth: Sequence[Iterable] | Sequence[bool],
    predicted: Sequence[Iterable] | Sequence[bool],
) -> ConfusionMatrix:
    """Tally per-record binary outcomes; label identity is not compared."""
    if len(truth) != len(predicted):
        raise EvalError(f"length mismatch: {len(truth)} truth rows vs {len(predicted)} predictions")
    tp = tn = fp = fn = 0
    for t, p in zip(truth, predicted):
        t_pos, p_pos = bool(t), bool(p)
        if t_pos and p_pos:
            tp += 1
        elif t_pos:
            fn += 1
        elif p_pos:
            fp += 1
        else:
            tn += 1
    return ConfusionMatrix(tp, tn, fp, fn)


def _ratio(num: int, den: int) -> float:
    return num / den if den else 0.0


def compute_metrics(cm: ConfusionMatrix) -> MetricsReport:
    """Evaluate every metric from exact integer counts in double precision."""
    tp, tn, fp, fn = cm.tp, cm.tn, cm.fp, cm.fn
    tpr = _ratio(tp, tp + fn)
    tnr = _ratio(tn, tn + fp)
    fpr = _ratio(fp, fp + tn)
    fnr = _ratio(fn, fn + tp)
    precision = _ratio(tp, tp + fp)
    npv = _ratio(tn, tn + fn)
    accuracy = _ratio(tp + tn, cm.total)
    f1 = 2 * precision * tpr / (precision + tpr) if precision + tpr > 0 else 0.0
    markedness = precision + npv - 1
    informedness = tpr + tnr - 1
    margins = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn)
    mcc = (tp * tn - fp * fn) / math.sqrt(margins) if margins else 0.0
    return MetricsReport(
        tpr=tpr,
        fpr=fpr,
        fnr=fnr,
        precision=precision,
        accuracy=accuracy,
        f1=f1,
        markedness=markedness,
        informedness=informedness,
        mcc=mcc,
        matrix=cm,
    )


_LEVEL_ORDER = (TrainingLevel.WITHOUT, TrainingLevel.PARTIAL, TrainingLevel.FULL)


def level_comparison(
    reports: Mapping[TrainingLevel, MetricsReport | float],
) -> tuple[float, ...]:
    """Accuracy deltas between consecutive training levels, in percentage points.

    With all three levels present the result is
    (partial - without, full - partial).
    """
    present = [level for level in _LEVEL_ORDER if level in reports]
    if len(present) < 2:
        missing = [level.value for level in _LEVEL_ORDER if level not in reports]
        raise EvalError(f"need at least two training levels, missing: {missing}")
    accuracies = []
    for level in present:
        report = reports[level]
        accuracies.append(report.accuracy if isinstance(report, MetricsReport) else float(report))
    return tuple((b - a) * 100.0 for a, b in zip(accuracies, accuracies[1:]))

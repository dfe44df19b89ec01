"""Streaming GOOSE anomaly rules GR1-GR8 over an ordered record sequence.

Per-record conditions, checked against the immediate predecessor:

    GR1  same dm/sm, unchanged data, sqnum != prev.sqnum + 1   -> "sqnum anomaly"
    GR2  data changed, not (stnum == prev+1 and sqnum == 0)    -> "stnum/sqnum reset anomaly"
    GR3  same dm/sm, stnum < prev.stnum                        -> "stnum decrease anomaly"
    GR4  any of dm/sm/ethertype/appid/dataset/goid changed     -> "attribute change anomaly"
    GR5  raw time text is not HH:MM:SS.ssssss                  -> "time format anomaly"
    GR6  more than 10 records within the trailing 10 µs        -> "high data rate anomaly"
    GR7  inter-arrival greater than 10 s                       -> "data gap anomaly"
    GR8  data unchanged, stnum changed or sqnum != prev+1      -> "data change anomaly"

GR8's published wording guards on *changed* data, which would flag every
legitimate state change and contradict GR2; the default implements
retransmission semantics (unchanged data). Pass ``gr8_literal=True`` for
the published reading.

Records whose raw time text fails GR5 are "time-blind": they are exempt
from the capture-order check, never enter the GR6 window, and the
GR7 gap is not evaluated on them or on their immediate successor
(the gap is unmeasurable without a trusted predecessor timestamp).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable

from .errors import OrderError
from .model import AnomalyLabel, Finding, GooseRecord, Protocol, validate_time_format
from .rulebook import RuleId, RuleSet, full_rules

DetectorMode = str  # "strict" (predecessor comparison) or "per-stream"


@dataclass(frozen=True)
class GooseThresholds:
    """Detection constants; defaults can be adjusted per deployment."""

    burst_count: int = 10
    burst_window_us: int = 10
    gap_us: int = 10_000_000


def _check_rules(rules: RuleSet | None) -> RuleSet:
    if rules is None:
        return full_rules(Protocol.GOOSE)
    rules = frozenset(rules)
    bad = [r.value for r in rules if r.protocol is not Protocol.GOOSE]
    if bad:
        raise ValueError(f"non-GOOSE rules in GOOSE detector: {bad}")
    return rules


class GooseDetector:
    """Single-stream stateful detector; not safe for concurrent use."""

    def __init__(
        self,
        rules: RuleSet | None = None,
        *,
        mode: DetectorMode = "strict",
        gr8_literal: bool = False,
        thresholds: GooseThresholds | None = None,
    ):
        if mode not in ("strict", "per-stream"):
            raise ValueError(f"unknown detector mode: {mode!r}")
        self.rules = _check_rules(rules)
        self.mode = mode
        self.gr8_literal = gr8_literal
        self.thresholds = thresholds or GooseThresholds()
        self._index = -1
        self._prev: GooseRecord | None = None
        self._prev_time_valid = False
        self._last_valid_us: int | None = None
        self._window: deque[int] = deque()
        self._baselines: dict[tuple, tuple] = {}

    def process(self, record: GooseRecord, raw_time: str | None = None) -> frozenset[AnomalyLabel]:
        """Evaluate one record; raw_time=None means canonically rendered."""
        self._index += 1
        rules = self.rules
        thr = self.thresholds
        labels = []

        time_valid = raw_time is None or validate_time_format(raw_time)
        t = record.time.total_micros if time_valid else None
        if not time_valid and RuleId.GR5 in rules:
            labels.append(AnomalyLabel.GOOSE_TIME_FORMAT)
        if t is not None and self._last_valid_us is not None and t < self._last_valid_us:
            raise OrderError("timestamp regressed; stream is not in capture order", self._index)

        prev = self._prev
        if prev is not None:
            same_addr = record.dm == prev.dm and record.sm == prev.sm
            data_changed = record.data1 != prev.data1 or record.data2 != prev.data2
            sq_next = record.sqnum == prev.sqnum + 1
            if RuleId.GR1 in rules and same_addr and not data_changed and not sq_next:
                labels.append(AnomalyLabel.SQNUM)
            if RuleId.GR2 in rules and data_changed and not (record.stnum == prev.stnum + 1 and record.sqnum == 0):
                labels.append(AnomalyLabel.STNUM_SQNUM_RESET)
            if RuleId.GR3 in rules and same_addr and record.stnum < prev.stnum:
                labels.append(AnomalyLabel.STNUM_DECREASE)
            if RuleId.GR4 in rules and self.mode == "strict":
                if (
                    record.dm != prev.dm
                    or record.sm != prev.sm
                    or record.ethertype != prev.ethertype
                    or record.appid != prev.appid
                    or record.dataset != prev.dataset
                    or record.goid != prev.goid
                ):
                    labels.append(AnomalyLabel.ATTRIBUTE_CHANGE)
            if (
                RuleId.GR7 in rules
                and t is not None
                and self._prev_time_valid
                and t - prev.time.total_micros > thr.gap_us
            ):
                labels.append(AnomalyLabel.DATA_GAP)
            if RuleId.GR8 in rules:
                counters_off = record.stnum != prev.stnum or not sq_next
                if (data_changed if self.gr8_literal else not data_changed) and counters_off:
                    labels.append(AnomalyLabel.DATA_CHANGE)

        if self.mode == "per-stream":
            key = (record.sm, record.dm, record.appid)
            attrs = (record.ethertype, record.dataset, record.goid)
            baseline = self._baselines.setdefault(key, attrs)
            if RuleId.GR4 in rules and attrs != baseline:
                labels.append(AnomalyLabel.ATTRIBUTE_CHANGE)

        if t is not None:
            window = self._window
            window.append(t)
            floor = t - thr.burst_window_us
            while window[0] < floor:
                window.popleft()
            if RuleId.GR6 in rules and len(window) > thr.burst_count:
                labels.append(AnomalyLabel.HIGH_DATA_RATE)
            self._last_valid_us = t

        self._prev = record
        self._prev_time_valid = time_valid
        return frozenset(labels)


def detect_goose_stream(
    entries: Iterable[tuple[GooseRecord, str | None]],
    rules: RuleSet | None = None,
    *,
    mode: DetectorMode = "strict",
    gr8_literal: bool = False,
    thresholds: GooseThresholds | None = None,
) -> list[Finding]:
    """Fold the detector over a stream; one Finding per flagged record."""
    detector = GooseDetector(rules, mode=mode, gr8_literal=gr8_literal, thresholds=thresholds)
    findings: list[Finding] = []
    for index, (record, raw_time) in enumerate(entries):
        labels = detector.process(record, raw_time)
        if labels:
            findings.append(Finding(index, labels, record.stream_key, record.time))
    return findings

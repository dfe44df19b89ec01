"""Streaming SV anomaly rules SR1-SR8 over an ordered record sequence.

Per-record conditions:

    SR1     smpcnt > 4799                                      -> "SmpCnt range anomaly"
    SR2/SR8 prev exists, prev != 4799, smpcnt != prev + 1      -> "SmpCnt increase anomaly"
    SR3     prev exists, prev < 4799, smpcnt < prev            -> "SmpCnt decrease anomaly"
    SR4     any of dm/sm/ethertype/appid/svid changed          -> "Field consistency anomaly"
    SR5     raw time text is not HH:MM:SS.ssssss               -> "Time format anomaly"
    SR6     inter-arrival outside [200 µs, 215 µs] inclusive   -> "Time interval anomaly"
    SR7     more than 12 records within the trailing 2083 µs   -> "Data rate anomaly"

The wrap 4799 -> 0 is compliant and exempt from SR2/SR3. SR8 restates
SR2; either id arms the shared check. Negative counters cannot occur
(the field is unsigned), so SR1 only has an upper bound to enforce.

Time-blind handling matches the GOOSE engine: a record with malformed
time text is exempt from the order check, never enters the SR7 window,
and SR6 is skipped on it and on its immediate successor.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable

from .errors import OrderError
from .model import SMPCNT_MAX, AnomalyLabel, Finding, Protocol, SvRecord, validate_time_format
from .rulebook import RuleId, RuleSet, full_rules

DetectorMode = str


@dataclass(frozen=True)
class SvThresholds:
    """Detection constants; defaults can be adjusted per deployment."""

    interval_min_us: int = 200
    interval_max_us: int = 215
    burst_count: int = 12
    burst_window_us: int = 2083


def _check_rules(rules: RuleSet | None) -> RuleSet:
    if rules is None:
        return full_rules(Protocol.SV)
    rules = frozenset(rules)
    bad = [r.value for r in rules if r.protocol is not Protocol.SV]
    if bad:
        raise ValueError(f"non-SV rules in SV detector: {bad}")
    return rules


class SvDetector:
    """Single-stream stateful detector; not safe for concurrent use."""

    def __init__(
        self,
        rules: RuleSet | None = None,
        *,
        mode: DetectorMode = "strict",
        thresholds: SvThresholds | None = None,
    ):
        if mode not in ("strict", "per-stream"):
            raise ValueError(f"unknown detector mode: {mode!r}")
        self.rules = _check_rules(rules)
        self.mode = mode
        self.thresholds = thresholds or SvThresholds()
        self._index = -1
        self._prev: SvRecord | None = None
        self._prev_time_valid = False
        self._last_valid_us: int | None = None
        self._window: deque[int] = deque()
        self._baselines: dict[tuple, tuple] = {}
        self._increase_armed = RuleId.SR2 in self.rules or RuleId.SR8 in self.rules

    def process(self, record: SvRecord, raw_time: str | None = None) -> frozenset[AnomalyLabel]:
        """Evaluate one record; raw_time=None means canonically rendered."""
        self._index += 1
        rules = self.rules
        thr = self.thresholds
        labels = []

        time_valid = raw_time is None or validate_time_format(raw_time)
        t = record.time.total_micros if time_valid else None
        if not time_valid and RuleId.SR5 in rules:
            labels.append(AnomalyLabel.SV_TIME_FORMAT)
        if t is not None and self._last_valid_us is not None and t < self._last_valid_us:
            raise OrderError("timestamp regressed; stream is not in capture order", self._index)

        if RuleId.SR1 in rules and record.smpcnt > SMPCNT_MAX:
            labels.append(AnomalyLabel.SMPCNT_RANGE)

        prev = self._prev
        if prev is not None:
            if self._increase_armed and prev.smpcnt != SMPCNT_MAX and record.smpcnt != prev.smpcnt + 1:
                labels.append(AnomalyLabel.SMPCNT_INCREASE)
            if RuleId.SR3 in rules and prev.smpcnt < SMPCNT_MAX and record.smpcnt < prev.smpcnt:
                labels.append(AnomalyLabel.SMPCNT_DECREASE)
            if RuleId.SR4 in rules and self.mode == "strict":
                if (
                    record.dm != prev.dm
                    or record.sm != prev.sm
                    or record.ethertype != prev.ethertype
                    or record.appid != prev.appid
                    or record.svid != prev.svid
                ):
                    labels.append(AnomalyLabel.FIELD_CONSISTENCY)
            if RuleId.SR6 in rules and t is not None and self._prev_time_valid:
                dt = t - prev.time.total_micros
                if dt < thr.interval_min_us or dt > thr.interval_max_us:
                    labels.append(AnomalyLabel.TIME_INTERVAL)

        if self.mode == "per-stream":
            key = (record.sm, record.dm, record.appid)
            attrs = (record.ethertype, record.svid)
            baseline = self._baselines.setdefault(key, attrs)
            if RuleId.SR4 in rules and attrs != baseline:
                labels.append(AnomalyLabel.FIELD_CONSISTENCY)

        if t is not None:
            window = self._window
            window.append(t)
            floor = t - thr.burst_window_us
            while window[0] < floor:
                window.popleft()
            if RuleId.SR7 in rules and len(window) > thr.burst_count:
                labels.append(AnomalyLabel.DATA_RATE)
            self._last_valid_us = t

        self._prev = record
        self._prev_time_valid = time_valid
        return frozenset(labels)


def detect_sv_stream(
    entries: Iterable[tuple[SvRecord, str | None]],
    rules: RuleSet | None = None,
    *,
    mode: DetectorMode = "strict",
    thresholds: SvThresholds | None = None,
) -> list[Finding]:
    """Fold the detector over a stream; one Finding per flagged record."""
    detector = SvDetector(rules, mode=mode, thresholds=thresholds)
    findings: list[Finding] = []
    for index, (record, raw_time) in enumerate(entries):
        labels = detector.process(record, raw_time)
        if labels:
            findings.append(Finding(index, labels, record.stream_key, record.time))
    return findings

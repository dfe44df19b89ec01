"""Deterministic benign-traffic generation and labeled anomaly injection.

Ground truth is what the full rule set provably assigns: after every
injection the per-record label sets are recomputed by an independent
naive reference evaluation of the rules (no code shared with the
streaming detectors), so generator and detectors check each other.

Benign GOOSE streams are heartbeat retransmissions (constant stnum,
sqnum advancing by 1) with optional state changes (stnum + 1, sqnum
reset to 0, data1 toggled). Benign SV streams count smpcnt 0..4799 with
wrap, on the integer schedule t_k = k * 10^6 // rate, which realizes
4800 Hz as repeating 208/208/209 µs inter-arrivals summing to exactly
one second per 4800 samples.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterator

from .errors import InjectError, OrderError, ProfileError
from .goose_rules import GooseThresholds
from .model import (
    GOOSE_ETHERTYPE,
    MICROS_PER_DAY,
    SMPCNT_MAX,
    SV_ETHERTYPE,
    AnomalyLabel,
    GooseRecord,
    MacAddress,
    MicroTimestamp,
    Protocol,
    SvRecord,
    validate_time_format,
)
from .rulebook import RuleId, RuleSet, full_rules
from .sv_rules import SvThresholds

RNG_ALGORITHM = "python-random-mt19937"

# Minimum spacing between scheduled GOOSE emissions; keeps any benign
# pair far outside the 10 µs burst window.
_MIN_GOOSE_SPACING_US = 100

_GOOSE_DM = MacAddress.parse("01:00:03:00:00:01")
_GOOSE_SM = MacAddress.parse("27:34:31:00:00:01")
_SV_DM = MacAddress.parse("01:0c:cd:04:00:01")
_SV_SM = MacAddress.parse("aa:bb:cc:00:00:01")


@dataclass(frozen=True)
class BenignProfile:
    """Shape of a compliant publisher stream."""

    protocol: Protocol
    duration_s: float = 1.0
    start: MicroTimestamp = MicroTimestamp(36_000, 0)
    heartbeat_us: int = 1_000_000
    state_change_rate: float = 0.0
    sv_rate: int = 4800
    dm: MacAddress | None = None
    sm: MacAddress | None = None
    appid: int | None = None
    dataset: str = "DS1"
    goid: str = "GO1"
    svid: str = "SV1"

    def identity(self) -> tuple[MacAddress, MacAddress, int]:
        if self.protocol is Protocol.GOOSE:
            return (self.dm or _GOOSE_DM, self.sm or _GOOSE_SM, 3 if self.appid is None else self.appid)
        return (self.dm or _SV_DM, self.sm or _SV_SM, 40 if self.appid is None else self.appid)

    def to_metadata(self) -> dict:
        dm, sm, appid = self.identity()
        meta = {
            "protocol": self.protocol.value,
            "duration_s": self.duration_s,
            "start": self.start.render(),
            "dm": str(dm),
            "sm": str(sm),
            "appid": appid,
        }
        if self.protocol is Protocol.GOOSE:
            meta.update(
                heartbeat_us=self.heartbeat_us,
                state_change_rate=self.state_change_rate,
                dataset=self.dataset,
                goid=self.goid,
            )
        else:
            meta.update(sv_rate=self.sv_rate, svid=self.svid)
        return meta


class ScenarioKind(str, Enum):
    REPLAY = "replay"
    FALSE_DATA_INJECTION = "false-data-injection"
    DOS_FLOOD = "dos-flood"
    DATA_GAP = "data-gap"
    FIELD_TAMPER = "field-tamper"
    COUNTER_JUMP = "counter-jump"
    INTERVAL_JITTER = "interval-jitter"
    TIME_CORRUPTION = "time-corruption"


@dataclass(frozen=True)
class AttackScenario:
    """One labeled anomaly injection.

    position selects the base record (default: mid-stream; end of
    stream for SV floods). Intensity parameters that are left None take
    per-kind defaults. The seed is recorded in stream metadata so a
    scenario can be replayed bit-for-bit.
    """

    kind: ScenarioKind
    position: int | None = None
    seed: int = 0
    count: int | None = None      # dos-flood: inserted packets
    span_us: int | None = None    # dos-flood: burst spread
    shift_us: int | None = None   # data-gap / interval-jitter
    target: int | None = None     # counter-jump: forged smpcnt
    field: str | None = None      # field-tamper target / FDI mode

    def to_metadata(self) -> dict:
        meta = {"kind": self.kind.value, "seed": self.seed}
        for name in ("position", "count", "span_us", "shift_us", "target", "field"):
            value = getattr(self, name)
            if value is not None:
                meta[name] = value
        return meta


@dataclass(frozen=True)
class LabeledStream:
    """Ordered records plus per-record ground-truth label sets."""

    protocol: Protocol
    records: tuple
    raw_times: tuple  # str for literal text, None for canonical rendering
    truth: tuple      # frozenset[AnomalyLabel] per record
    metadata: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.records)

    def entries(self) -> list[tuple]:
        return list(zip(self.records, self.raw_times))

    @property
    def positive_count(self) -> int:
        return sum(1 for labels in self.truth if labels)


# ---------------------------------------------------------------------------
# Benign generation


def _validate_profile(profile: BenignProfile) -> int:
    """Check profile invariants; returns the duration in microseconds."""
    if profile.duration_s < 0:
        raise ProfileError("duration must be non-negative")
    duration_us = round(profile.duration_s * 1_000_000)
    if profile.start.total_micros + duration_us >= MICROS_PER_DAY:
        raise ProfileError("stream would cross midnight; captures are bounded to one day")
    if profile.protocol is Protocol.GOOSE:
        if profile.heartbeat_us < _MIN_GOOSE_SPACING_US:
            raise ProfileError(f"heartbeat interval below {_MIN_GOOSE_SPACING_US} µs")
        if profile.heartbeat_us > GooseThresholds().gap_us:
            raise ProfileError("heartbeat interval exceeds the 10 s gap rule")
        if profile.state_change_rate < 0:
            raise ProfileError("state change rate must be non-negative")
        if profile.state_change_rate * _MIN_GOOSE_SPACING_US * 4 > 1_000_000:
            raise ProfileError("state change rate too dense to keep emissions spaced")
    else:
        if profile.sv_rate <= 0:
            raise ProfileError("sv rate must be positive")
        thr = SvThresholds()
        base = 1_000_000 // profile.sv_rate
        widest = base if 1_000_000 % profile.sv_rate == 0 else base + 1
        if base < thr.interval_min_us or widest > thr.interval_max_us:
            raise ProfileError(
                f"rate {profile.sv_rate}/s yields {base}-{widest} µs intervals, "
                f"outside [{thr.interval_min_us}, {thr.interval_max_us}] µs"
            )
    return duration_us


def _goose_state_change_times(profile: BenignProfile, duration_us: int, seed: int) -> list[int]:
    events = round(profile.state_change_rate * profile.duration_s)
    if events == 0:
        return []
    rng = random.Random(seed)
    taken: list[int] = []
    for _ in range(events):
        for _attempt in range(1000):
            t = rng.randrange(1, duration_us) if duration_us > 1 else 0
            near_heartbeat = min(t % profile.heartbeat_us, profile.heartbeat_us - t % profile.heartbeat_us)
            if near_heartbeat < _MIN_GOOSE_SPACING_US:
                continue
            if all(abs(t - other) >= _MIN_GOOSE_SPACING_US for other in taken):
                taken.append(t)
                break
        else:
            raise ProfileError("could not place state changes with the required spacing")
    return sorted(taken)


def _iter_goose(profile: BenignProfile, seed: int, heartbeats: int, sc_times: list[int]) -> Iterator[GooseRecord]:
    dm, sm, appid = profile.identity()
    start_us = profile.start.total_micros
    stnum, sqnum = 1, 0
    data1 = data2 = False
    sc = iter(sc_times + [None])
    next_sc = next(sc)
    emitted = 0
    for k in range(heartbeats):
        hb_t = k * profile.heartbeat_us
        while next_sc is not None and next_sc < hb_t:
            stnum, sqnum, data1 = stnum + 1, 0, not data1
            yield GooseRecord(
                MicroTimestamp.from_micros(start_us + next_sc),
                dm, sm, GOOSE_ETHERTYPE, appid, profile.dataset, profile.goid,
                stnum, sqnum, data1, data2,
            )
            next_sc = next(sc)
        if emitted:
            sqnum += 1
        emitted += 1
        yield GooseRecord(
            MicroTimestamp.from_micros(start_us + hb_t),
            dm, sm, GOOSE_ETHERTYPE, appid, profile.dataset, profile.goid,
            stnum, sqnum, data1, data2,
        )
    while next_sc is not None:
        stnum, sqnum, data1 = stnum + 1, 0, not data1
        yield GooseRecord(
            MicroTimestamp.from_micros(start_us + next_sc),
            dm, sm, GOOSE_ETHERTYPE, appid, profile.dataset, profile.goid,
            stnum, sqnum, data1, data2,
        )
        next_sc = next(sc)


def _iter_sv(profile: BenignProfile, count: int) -> Iterator[SvRecord]:
    dm, sm, appid = profile.identity()
    start_us = profile.start.total_micros
    rate = profile.sv_rate
    for k in range(count):
        yield SvRecord(
            MicroTimestamp.from_micros(start_us + k * 1_000_000 // rate),
            dm, sm, SV_ETHERTYPE, appid, profile.svid, k % (SMPCNT_MAX + 1),
        )


def iter_benign_records(profile: BenignProfile, seed: int = 0) -> Iterator[GooseRecord | SvRecord]:
    """Lazily yield a compliant stream; constant memory in stream length."""
    duration_us = _validate_profile(profile)
    if duration_us == 0:
        return
    if profile.protocol is Protocol.GOOSE:
        heartbeats = duration_us // profile.heartbeat_us + 1
        sc_times = _goose_state_change_times(profile, duration_us, seed)
        yield from _iter_goose(profile, seed, heartbeats, sc_times)
    else:
        yield from _iter_sv(profile, round(profile.duration_s * profile.sv_rate))


def generate_benign(profile: BenignProfile, seed: int = 0) -> LabeledStream:
    """Materialize a compliant stream with all-empty ground truth."""
    records = tuple(iter_benign_records(profile, seed))
    metadata = {
        "generator": "benign",
        "seed": seed,
        "rng": RNG_ALGORITHM,
        "profile": profile.to_metadata(),
        "records": len(records),
    }
    return LabeledStream(
        protocol=profile.protocol,
        records=records,
        raw_times=(None,) * len(records),
        truth=(frozenset(),) * len(records),
        metadata=metadata,
    )


# ---------------------------------------------------------------------------
# Independent reference evaluation (ground truth)


def _reference_goose_labels(records, raws, rules, mode, gr8_literal, thr) -> list[frozenset]:
    valid = [raw is None or validate_time_format(raw) for raw in raws]
    us = [r.time.total_micros for r in records]
    baselines: dict = {}
    out: list[frozenset] = []
    last_valid: int | None = None
    for i, r in enumerate(records):
        labels = set()
        if not valid[i]:
            if RuleId.GR5 in rules:
                labels.add(AnomalyLabel.GOOSE_TIME_FORMAT)
        else:
            if last_valid is not None and us[i] < last_valid:
                raise OrderError("timestamp regressed", i)
        if i > 0:
            p = records[i - 1]
            same_addr = r.dm == p.dm and r.sm == p.sm
            data_changed = (r.data1, r.data2) != (p.data1, p.data2)
            sq_next = r.sqnum == p.sqnum + 1
            if RuleId.GR1 in rules and same_addr and not data_changed and not sq_next:
                labels.add(AnomalyLabel.SQNUM)
            if RuleId.GR2 in rules and data_changed and not (r.stnum == p.stnum + 1 and r.sqnum == 0):
                labels.add(AnomalyLabel.STNUM_SQNUM_RESET)
            if RuleId.GR3 in rules and same_addr and r.stnum < p.stnum:
                labels.add(AnomalyLabel.STNUM_DECREASE)
            if RuleId.GR4 in rules and mode == "strict":
                if (r.dm, r.sm, r.ethertype, r.appid, r.dataset, r.goid) != (
                    p.dm, p.sm, p.ethertype, p.appid, p.dataset, p.goid,
                ):
                    labels.add(AnomalyLabel.ATTRIBUTE_CHANGE)
            if RuleId.GR7 in rules and valid[i] and valid[i - 1] and us[i] - us[i - 1] > thr.gap_us:
                labels.add(AnomalyLabel.DATA_GAP)
            if RuleId.GR8 in rules:
                gr8_guard = data_changed if gr8_literal else not data_changed
                if gr8_guard and (r.stnum != p.stnum or not sq_next):
                    labels.add(AnomalyLabel.DATA_CHANGE)
        if mode == "per-stream":
            key = (r.sm, r.dm, r.appid)
            attrs = (r.ethertype, r.dataset, r.goid)
            baseline = baselines.setdefault(key, attrs)
            if RuleId.GR4 in rules and attrs != baseline:
                labels.add(AnomalyLabel.ATTRIBUTE_CHANGE)
        if valid[i]:
            in_window = 0
            for j in range(i, -1, -1):
                if not valid[j]:
                    continue
                if us[j] < us[i] - thr.burst_window_us:
                    break
                in_window += 1
            if RuleId.GR6 in rules and in_window > thr.burst_count:
                labels.add(AnomalyLabel.HIGH_DATA_RATE)
            last_valid = us[i]
        out.append(frozenset(labels))
    return out


def _reference_sv_labels(records, raws, rules, mode, thr) -> list[frozenset]:
    valid = [raw is None or validate_time_format(raw) for raw in raws]
    us = [r.time.total_micros for r in records]
    increase_armed = RuleId.SR2 in rules or RuleId.SR8 in rules
    baselines: dict = {}
    out: list[frozenset] = []
    last_valid: int | None = None
    for i, r in enumerate(records):
        labels = set()
        if not valid[i]:
            if RuleId.SR5 in rules:
                labels.add(AnomalyLabel.SV_TIME_FORMAT)
        else:
            if last_valid is not None and us[i] < last_valid:
                raise OrderError("timestamp regressed", i)
        if RuleId.SR1 in rules and r.smpcnt > SMPCNT_MAX:
            labels.add(AnomalyLabel.SMPCNT_RANGE)
        if i > 0:
            p = records[i - 1]
            if increase_armed and p.smpcnt != SMPCNT_MAX and r.smpcnt != p.smpcnt + 1:
                labels.add(AnomalyLabel.SMPCNT_INCREASE)
            if RuleId.SR3 in rules and p.smpcnt < SMPCNT_MAX and r.smpcnt < p.smpcnt:
                labels.add(AnomalyLabel.SMPCNT_DECREASE)
            if RuleId.SR4 in rules and mode == "strict":
                if (r.dm, r.sm, r.ethertype, r.appid, r.svid) != (p.dm, p.sm, p.ethertype, p.appid, p.svid):
                    labels.add(AnomalyLabel.FIELD_CONSISTENCY)
            if RuleId.SR6 in rules and valid[i] and valid[i - 1]:
                dt = us[i] - us[i - 1]
                if dt < thr.interval_min_us or dt > thr.interval_max_us:
                    labels.add(AnomalyLabel.TIME_INTERVAL)
        if mode == "per-stream":
            key = (r.sm, r.dm, r.appid)
            attrs = (r.ethertype, r.svid)
            baseline = baselines.setdefault(key, attrs)
            if RuleId.SR4 in rules and attrs != baseline:
                labels.add(AnomalyLabel.FIELD_CONSISTENCY)
        if valid[i]:
            in_window = 0
            for j in range(i, -1, -1):
                if not valid[j]:
                    continue
                if us[j] < us[i] - thr.burst_window_us:
                    break
                in_window += 1
            if RuleId.SR7 in rules and in_window > thr.burst_count:
                labels.add(AnomalyLabel.DATA_RATE)
            last_valid = us[i]
        out.append(frozenset(labels))
    return out


def reference_labels(
    protocol: Protocol,
    records,
    raws,
    rules: RuleSet | None = None,
    *,
    mode: str = "strict",
    gr8_literal: bool = False,
) -> list[frozenset]:
    """Naive per-record rule evaluation, independent of the streaming engines."""
    rules = full_rules(protocol) if rules is None else rules
    if protocol is Protocol.GOOSE:
        return _reference_goose_labels(records, raws, rules, mode, gr8_literal, GooseThresholds())
    return _reference_sv_labels(records, raws, rules, mode, SvThresholds())


# ---------------------------------------------------------------------------
# Attack injection

_TAMPER_FIELDS = {
    Protocol.GOOSE: ("dm", "sm", "appid", "dataset", "goid"),
    Protocol.SV: ("dm", "sm", "appid", "svid"),
}


def _shift_times(records: list, start: int, shift_us: int) -> None:
    for i in range(start, len(records)):
        new_us = records[i].time.total_micros + shift_us
        try:
            records[i] = replace(records[i], time=MicroTimestamp.from_micros(new_us))
        except ValueError:
            raise InjectError("time shift pushes records outside the day") from None


def _mutated_field_value(record, name: str):
    value = getattr(record, name)
    if isinstance(value, MacAddress):
        return MacAddress(value.octets[:5] + bytes((value.octets[5] ^ 0x01,)))
    if isinstance(value, int):
        return (value + 1) % 0x10000
    return value + "X"


def _corrupt_time_text(time: MicroTimestamp) -> str:
    # Drop four fractional digits: still time-like, but fails HH:MM:SS.ssssss.
    return time.render()[:-4]


def inject(stream: LabeledStream, scenario: AttackScenario) -> LabeledStream:
    """Apply one attack scenario; ground truth is recomputed for the result."""
    n = len(stream)
    if n == 0:
        raise InjectError("cannot inject into an empty stream")
    protocol = stream.protocol
    kind = scenario.kind
    records = list(stream.records)
    raws = list(stream.raw_times)

    if scenario.position is None:
        position = n - 1 if (kind is ScenarioKind.DOS_FLOOD and protocol is Protocol.SV) else n // 2
    else:
        position = scenario.position
    if not 0 <= position < n:
        raise InjectError(f"position {position} outside stream of {n} records")

    if kind in (ScenarioKind.COUNTER_JUMP, ScenarioKind.INTERVAL_JITTER) and protocol is not Protocol.SV:
        raise InjectError(f"scenario {kind.value} is defined for SV streams only")

    injected: list[int]
    if kind is ScenarioKind.REPLAY:
        if protocol is Protocol.SV:
            while position < n and records[position].smpcnt == SMPCNT_MAX:
                position += 1
            if position >= n:
                raise InjectError("no replayable record with smpcnt below 4799")
        records.insert(position + 1, records[position])
        raws.insert(position + 1, raws[position])
        injected = [position + 1]
        if protocol is Protocol.GOOSE:
            declared = {AnomalyLabel.SQNUM, AnomalyLabel.DATA_CHANGE}
        else:
            declared = {AnomalyLabel.SMPCNT_INCREASE, AnomalyLabel.TIME_INTERVAL}

    elif kind is ScenarioKind.FALSE_DATA_INJECTION:
        position = max(position, 1)
        if protocol is Protocol.GOOSE:
            mode = scenario.field or "data"
            if mode not in ("data", "stnum"):
                raise InjectError(f"unknown GOOSE injection mode: {mode!r}")
            # Target a retransmission (sqnum > 0) so the tamper breaks the
            # expected pattern instead of mimicking a state change.
            while position < n and records[position].sqnum == 0:
                position += 1
            if position >= n:
                raise InjectError("no retransmission record to tamper with")
            if mode == "data":
                for i in range(position, n):
                    records[i] = replace(records[i], data1=not records[i].data1)
                declared = {AnomalyLabel.STNUM_SQNUM_RESET}
            else:
                if records[position].stnum == 0:
                    raise InjectError("stnum already at zero; cannot decrease")
                for i in range(position, n):
                    records[i] = replace(records[i], stnum=records[i].stnum - 1)
                declared = {AnomalyLabel.STNUM_DECREASE, AnomalyLabel.DATA_CHANGE}
        else:
            while position < n and records[position - 1].smpcnt == SMPCNT_MAX:
                position += 1
            if position >= n:
                raise InjectError("no position with a non-wrapping predecessor")
            forged = (records[position].smpcnt + 2) % (SMPCNT_MAX + 1)
            records[position] = replace(records[position], smpcnt=forged)
            declared = {AnomalyLabel.SMPCNT_INCREASE}
        injected = [position]

    elif kind is ScenarioKind.DOS_FLOOD:
        if protocol is Protocol.GOOSE:
            count = 15 if scenario.count is None else scenario.count
            span = 8 if scenario.span_us is None else scenario.span_us
            thr_count, thr_window = GooseThresholds().burst_count, GooseThresholds().burst_window_us
            declared = {AnomalyLabel.HIGH_DATA_RATE}
        else:
            count = 20 if scenario.count is None else scenario.count
            span = 0 if scenario.span_us is None else scenario.span_us
            thr_count, thr_window = SvThresholds().burst_count, SvThresholds().burst_window_us
            declared = {AnomalyLabel.DATA_RATE}
        if count < thr_count:
            raise InjectError(f"flood of {count} packets cannot exceed the {thr_count}-packet window")
        if not 0 <= span <= thr_window:
            raise InjectError(f"burst span must lie within the {thr_window} µs window")
        base = records[position]
        base_us = base.time.total_micros
        if position + 1 < n and base_us + span > records[position + 1].time.total_micros:
            raise InjectError("burst span overlaps the next benign record")
        copies = []
        for j in range(1, count + 1):
            t = MicroTimestamp.from_micros(base_us + j * span // count)
            copies.append(replace(base, time=t))
        records[position + 1 : position + 1] = copies
        raws[position + 1 : position + 1] = [None] * count
        injected = list(range(position + 1, position + 1 + count))

    elif kind is ScenarioKind.DATA_GAP:
        position = max(position, 1)
        shift = 12_000_000 if scenario.shift_us is None else scenario.shift_us
        if protocol is Protocol.GOOSE:
            if shift <= GooseThresholds().gap_us:
                raise InjectError("gap must exceed the 10 s threshold")
            declared = {AnomalyLabel.DATA_GAP}
        else:
            if shift <= 0:
                raise InjectError("gap shift must be positive")
            thr = SvThresholds()
            new_dt = records[position].time.total_micros - records[position - 1].time.total_micros + shift
            if new_dt <= thr.interval_max_us:
                raise InjectError("gap too small to leave the accepted interval band")
            declared = {AnomalyLabel.TIME_INTERVAL}
        _shift_times(records, position, shift)
        injected = [position]

    elif kind is ScenarioKind.FIELD_TAMPER:
        position = max(position, 1)
        name = scenario.field or ("goid" if protocol is Protocol.GOOSE else "svid")
        if name not in _TAMPER_FIELDS[protocol]:
            raise InjectError(f"cannot tamper field {name!r} on a {protocol.value} stream")
        forged = _mutated_field_value(records[position], name)
        for i in range(position, n):
            records[i] = replace(records[i], **{name: forged})
        injected = [position]
        declared = {
            AnomalyLabel.ATTRIBUTE_CHANGE if protocol is Protocol.GOOSE else AnomalyLabel.FIELD_CONSISTENCY
        }

    elif kind is ScenarioKind.COUNTER_JUMP:
        target = 5000 if scenario.target is None else scenario.target
        if not 0 <= target <= 0xFFFF:
            raise InjectError(f"counter target out of 16-bit range: {target}")
        position = max(position, 1)
        while position < n and (
            records[position - 1].smpcnt == SMPCNT_MAX
            or target == records[position - 1].smpcnt + 1
            or target == records[position].smpcnt
        ):
            position += 1
        if position >= n:
            raise InjectError("no position where the forged counter breaks the sequence")
        prev_cnt = records[position - 1].smpcnt
        records[position] = replace(records[position], smpcnt=target)
        injected = [position]
        declared = {AnomalyLabel.SMPCNT_INCREASE}
        if target > SMPCNT_MAX:
            declared.add(AnomalyLabel.SMPCNT_RANGE)
        if target < prev_cnt:
            declared.add(AnomalyLabel.SMPCNT_DECREASE)

    elif kind is ScenarioKind.INTERVAL_JITTER:
        position = max(position, 1)
        shift = 16 if scenario.shift_us is None else scenario.shift_us
        thr = SvThresholds()
        dt = records[position].time.total_micros - records[position - 1].time.total_micros
        new_dt = dt + shift
        if new_dt < 0:
            raise InjectError("jitter would reorder the stream")
        if thr.interval_min_us <= new_dt <= thr.interval_max_us:
            raise InjectError(f"jitter keeps the interval at {new_dt} µs, inside the accepted band")
        _shift_times(records, position, shift)
        injected = [position]
        declared = {AnomalyLabel.TIME_INTERVAL}

    elif kind is ScenarioKind.TIME_CORRUPTION:
        raws[position] = _corrupt_time_text(records[position].time)
        injected = [position]
        declared = {
            AnomalyLabel.GOOSE_TIME_FORMAT if protocol is Protocol.GOOSE else AnomalyLabel.SV_TIME_FORMAT
        }

    else:  # pragma: no cover - enum is exhaustive
        raise InjectError(f"unknown scenario kind: {kind!r}")

    truth = reference_labels(protocol, records, raws)
    anchor = injected[-1]
    if not declared <= truth[anchor]:
        raise InjectError(
            f"{kind.value}: declared labels {sorted(l.value for l in declared)} "
            f"not assigned at record {anchor}"
        )

    metadata = dict(stream.metadata)
    applied = list(metadata.get("scenarios", []))
    applied.append(
        {
            **scenario.to_metadata(),
            "position": position,
            "injected": injected,
            "declared": sorted(label.value for label in declared),
        }
    )
    metadata["scenarios"] = applied
    metadata["records"] = len(records)
    return LabeledStream(
        protocol=protocol,
        records=tuple(records),
        raw_times=tuple(raws),
        truth=tuple(truth),
        metadata=metadata,
    )


# ---------------------------------------------------------------------------
# Count-targeted dataset construction


def scale_to_counts(
    positives: int,
    negatives: int,
    protocol: Protocol,
    seed: int = 0,
    profile: BenignProfile | None = None,
) -> LabeledStream:
    """Build a stream whose ground truth has exactly the requested counts.

    Anomalies are publisher-id mutations (goid for GOOSE, svid for SV):
    each selected record starts a new persistent id, so it alone breaks
    the consistency rule and every other record stays compliant. The
    first record can never be a positive (it has no predecessor).
    """
    if positives < 0 or negatives < 0:
        raise ProfileError("requested counts must be non-negative")
    n = positives + negatives
    if n == 0:
        raise ProfileError("requested an empty dataset")
    if positives > n - 1:
        raise ProfileError("first record cannot be anomalous; need at least one negative")

    if profile is None:
        profile = BenignProfile(protocol=protocol, state_change_rate=0.0)
    if protocol is Protocol.GOOSE:
        duration_s = (n - 1) * profile.heartbeat_us / 1_000_000
    else:
        duration_s = n / profile.sv_rate
    profile = replace(profile, protocol=protocol, duration_s=duration_s)
    records = list(iter_benign_records(profile, seed))
    if len(records) != n:
        raise ProfileError(f"profile produced {len(records)} records, need {n}")

    rng = random.Random(seed)
    positions = sorted(rng.sample(range(1, n), positives)) if positives else []
    name = "goid" if protocol is Protocol.GOOSE else "svid"
    base_id = getattr(records[0], name)
    for i, pos in enumerate(positions, start=1):
        for j in range(pos, n):
            records[j] = replace(records[j], **{name: f"{base_id}~{i}"})

    raws = [None] * n
    truth = reference_labels(protocol, records, raws)
    flagged = [i for i, labels in enumerate(truth) if labels]
    if flagged != positions:
        raise RuntimeError("count-targeted construction disagrees with the rule reference")

    metadata = {
        "generator": "scale-to-counts",
        "seed": seed,
        "rng": RNG_ALGORITHM,
        "profile": profile.to_metadata(),
        "positives": positives,
        "negatives": negatives,
        "records": n,
        "positions": positions,
    }
    return LabeledStream(
        protocol=protocol,
        records=tuple(records),
        raw_times=tuple(raws),
        truth=tuple(truth),
        metadata=metadata,
    )

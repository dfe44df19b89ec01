"""Core domain types: MAC addresses, microsecond timestamps, parsed
GOOSE/SV records, anomaly labels and detector findings.

All types here are immutable values and safe to share between threads.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

GOOSE_ETHERTYPE = 0x88B8
SV_ETHERTYPE = 0x88BA

SMPCNT_MAX = 4799

SECONDS_PER_DAY = 86_400
MICROS_PER_DAY = SECONDS_PER_DAY * 1_000_000

# HH in 00-23, MM/SS in 00-59, exactly six fractional digits.
_TIME_RE = re.compile(r"([01][0-9]|2[0-3]):([0-5][0-9]):([0-5][0-9])\.([0-9]{6})")


class Protocol(str, Enum):
    GOOSE = "goose"
    SV = "sv"


def validate_time_format(raw: str) -> bool:
    """True iff ``raw`` is a wall-clock time of the form HH:MM:SS.ssssss."""
    return _TIME_RE.fullmatch(raw) is not None


@dataclass(frozen=True, slots=True)
class MacAddress:
    """Six-octet MAC address; renders as lowercase colon-separated hex."""

    octets: bytes

    def __post_init__(self):
        if not isinstance(self.octets, bytes) or len(self.octets) != 6:
            raise ValueError("MAC address requires exactly six octets")

    @classmethod
    def parse(cls, text: str) -> "MacAddress":
        parts = text.split(":")
        if len(parts) != 6 or not all(len(p) == 2 for p in parts):
            raise ValueError(f"malformed MAC address: {text!r}")
        try:
            return cls(bytes(int(p, 16) for p in parts))
        except ValueError:
            raise ValueError(f"malformed MAC address: {text!r}") from None

    def __str__(self) -> str:
        return ":".join(f"{b:02x}" for b in self.octets)


@dataclass(frozen=True, slots=True, order=True)
class MicroTimestamp:
    """Wall-clock time of day with microsecond precision (no calendar date)."""

    seconds: int
    micros: int

    def __post_init__(self):
        if not 0 <= self.seconds < SECONDS_PER_DAY:
            raise ValueError(f"seconds-of-day out of range: {self.seconds}")
        if not 0 <= self.micros <= 999_999:
            raise ValueError(f"microseconds out of range: {self.micros}")

    @classmethod
    def from_micros(cls, total: int) -> "MicroTimestamp":
        if not 0 <= total < MICROS_PER_DAY:
            raise ValueError(f"microseconds-of-day out of range: {total}")
        return cls(total // 1_000_000, total % 1_000_000)

    @classmethod
    def parse(cls, text: str) -> "MicroTimestamp":
        m = _TIME_RE.fullmatch(text)
        if m is None:
            raise ValueError(f"not an HH:MM:SS.ssssss time: {text!r}")
        hh, mm, ss, frac = (int(g) for g in m.groups())
        return cls(hh * 3600 + mm * 60 + ss, frac)

    @property
    def total_micros(self) -> int:
        return self.seconds * 1_000_000 + self.micros

    def render(self) -> str:
        s = self.seconds
        return f"{s // 3600:02d}:{s % 3600 // 60:02d}:{s % 60:02d}.{self.micros:06d}"

    def __str__(self) -> str:
        return self.render()


def timestamp_diff_micros(a: MicroTimestamp, b: MicroTimestamp) -> int:
    """Signed difference (a - b) in whole microseconds."""
    return a.total_micros - b.total_micros


# Parsed time of a record whose raw time text failed format validation.
# The raw text decides validity; this placeholder never enters time math.
SENTINEL_TIME = MicroTimestamp(0, 0)


def _check_uint(value: int, bits: int, name: str) -> None:
    if not isinstance(value, int) or isinstance(value, bool) or not 0 <= value < (1 << bits):
        raise ValueError(f"{name} must be an unsigned {bits}-bit integer, got {value!r}")


@dataclass(frozen=True, slots=True)
class GooseRecord:
    """One parsed GOOSE message (well-formed frames carry EtherType 0x88B8)."""

    time: MicroTimestamp
    dm: MacAddress
    sm: MacAddress
    ethertype: int
    appid: int
    dataset: str
    goid: str
    stnum: int
    sqnum: int
    data1: bool
    data2: bool

    def __post_init__(self):
        _check_uint(self.ethertype, 16, "ethertype")
        _check_uint(self.appid, 16, "appid")
        _check_uint(self.stnum, 32, "stnum")
        _check_uint(self.sqnum, 32, "sqnum")

    @property
    def stream_key(self) -> tuple[MacAddress, MacAddress, int]:
        return (self.sm, self.dm, self.appid)


@dataclass(frozen=True, slots=True)
class SvRecord:
    """One parsed SV message (well-formed frames carry EtherType 0x88BA).

    smpcnt is rule-compliant in [0, 4799] but the type admits any 16-bit
    value so the detector can observe out-of-range counters.
    """

    time: MicroTimestamp
    dm: MacAddress
    sm: MacAddress
    ethertype: int
    appid: int
    svid: str
    smpcnt: int

    def __post_init__(self):
        _check_uint(self.ethertype, 16, "ethertype")
        _check_uint(self.appid, 16, "appid")
        _check_uint(self.smpcnt, 16, "smpcnt")

    @property
    def stream_key(self) -> tuple[MacAddress, MacAddress, int]:
        return (self.sm, self.dm, self.appid)


class AnomalyLabel(str, Enum):
    """The verdict strings emitted by the detection rules.

    Values are the verbatim report strings; rendering is injective and
    the GOOSE/SV time-format labels are distinct.
    """

    # GOOSE
    SQNUM = "sqnum anomaly"
    STNUM_SQNUM_RESET = "stnum/sqnum reset anomaly"
    STNUM_DECREASE = "stnum decrease anomaly"
    ATTRIBUTE_CHANGE = "attribute change anomaly"
    GOOSE_TIME_FORMAT = "time format anomaly"
    HIGH_DATA_RATE = "high data rate anomaly"
    DATA_GAP = "data gap anomaly"
    DATA_CHANGE = "data change anomaly"
    # SV
    SMPCNT_RANGE = "SmpCnt range anomaly"
    SMPCNT_INCREASE = "SmpCnt increase anomaly"
    SMPCNT_DECREASE = "SmpCnt decrease anomaly"
    FIELD_CONSISTENCY = "Field consistency anomaly"
    SV_TIME_FORMAT = "Time format anomaly"
    TIME_INTERVAL = "Time interval anomaly"
    DATA_RATE = "Data rate anomaly"

    @property
    def text(self) -> str:
        return self.value

    @property
    def protocol(self) -> Protocol:
        return Protocol.GOOSE if self in _GOOSE_LABELS else Protocol.SV

    @classmethod
    def parse(cls, text: str) -> "AnomalyLabel":
        try:
            return cls(text)
        except ValueError:
            raise ValueError(f"unknown anomaly label: {text!r}") from None


_GOOSE_LABELS = frozenset(
    {
        AnomalyLabel.SQNUM,
        AnomalyLabel.STNUM_SQNUM_RESET,
        AnomalyLabel.STNUM_DECREASE,
        AnomalyLabel.ATTRIBUTE_CHANGE,
        AnomalyLabel.GOOSE_TIME_FORMAT,
        AnomalyLabel.HIGH_DATA_RATE,
        AnomalyLabel.DATA_GAP,
        AnomalyLabel.DATA_CHANGE,
    }
)


@dataclass(frozen=True, slots=True)
class Finding:
    """A non-empty set of anomaly labels attached to one record."""

    index: int
    labels: frozenset[AnomalyLabel]
    stream_key: tuple[MacAddress, MacAddress, int]
    time: MicroTimestamp

    def __post_init__(self):
        if self.index < 0:
            raise ValueError("record index must be non-negative")
        if not self.labels:
            raise ValueError("a finding carries at least one label")

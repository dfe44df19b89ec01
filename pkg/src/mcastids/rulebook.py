"""Rule registry: rule ids GR1-GR8 / SR1-SR8, their anomaly labels,
and the without/partial/full training levels.

Partial defaults to ordinals 1-5 in catalog order; membership can be
overridden through a small key-value config file, e.g.::

    goose.partial = ["GR1", "GR2", "GR3", "GR4", "GR5"]
    sv.full = ["SR1", "SR2", "SR3", "SR4", "SR5", "SR6", "SR7", "SR8"]

Lines starting with ``#`` are comments; the right-hand side is a JSON
array of rule ids. Overridden levels must still nest strictly:
without < partial < full.
"""

from __future__ import annotations

import json
from enum import Enum
from pathlib import Path

from .errors import ConfigError
from .model import AnomalyLabel, Protocol


class RuleId(str, Enum):
    GR1 = "GR1"
    GR2 = "GR2"
    GR3 = "GR3"
    GR4 = "GR4"
    GR5 = "GR5"
    GR6 = "GR6"
    GR7 = "GR7"
    GR8 = "GR8"
    SR1 = "SR1"
    SR2 = "SR2"
    SR3 = "SR3"
    SR4 = "SR4"
    SR5 = "SR5"
    SR6 = "SR6"
    SR7 = "SR7"
    SR8 = "SR8"

    @property
    def protocol(self) -> Protocol:
        return Protocol.GOOSE if self.value[0] == "G" else Protocol.SV

    @property
    def ordinal(self) -> int:
        return int(self.value[2])


class TrainingLevel(str, Enum):
    WITHOUT = "without"
    PARTIAL = "partial"
    FULL = "full"


RuleSet = frozenset[RuleId]

# SR8 restates SR2's counter-increment requirement; both ids map to the
# same label so activating either arms the same check.
LABEL_FOR_RULE: dict[RuleId, AnomalyLabel] = {
    RuleId.GR1: AnomalyLabel.SQNUM,
    RuleId.GR2: AnomalyLabel.STNUM_SQNUM_RESET,
    RuleId.GR3: AnomalyLabel.STNUM_DECREASE,
    RuleId.GR4: AnomalyLabel.ATTRIBUTE_CHANGE,
    RuleId.GR5: AnomalyLabel.GOOSE_TIME_FORMAT,
    RuleId.GR6: AnomalyLabel.HIGH_DATA_RATE,
    RuleId.GR7: AnomalyLabel.DATA_GAP,
    RuleId.GR8: AnomalyLabel.DATA_CHANGE,
    RuleId.SR1: AnomalyLabel.SMPCNT_RANGE,
    RuleId.SR2: AnomalyLabel.SMPCNT_INCREASE,
    RuleId.SR3: AnomalyLabel.SMPCNT_DECREASE,
    RuleId.SR4: AnomalyLabel.FIELD_CONSISTENCY,
    RuleId.SR5: AnomalyLabel.SV_TIME_FORMAT,
    RuleId.SR6: AnomalyLabel.TIME_INTERVAL,
    RuleId.SR7: AnomalyLabel.DATA_RATE,
    RuleId.SR8: AnomalyLabel.SMPCNT_INCREASE,
}

RULES_FOR_LABEL: dict[AnomalyLabel, tuple[RuleId, ...]] = {}
for _rule, _label in LABEL_FOR_RULE.items():
    RULES_FOR_LABEL.setdefault(_label, ())
    RULES_FOR_LABEL[_label] += (_rule,)

_DESCRIPTIONS: dict[RuleId, str] = {
    RuleId.GR1: "sqnum must advance by 1 between retransmissions of the same data",
    RuleId.GR2: "a data1/data2 change must increment stnum and reset sqnum to 0",
    RuleId.GR3: "stnum must never decrease for the same dm/sm",
    RuleId.GR4: "dm, sm, type, appid, dataset and goid must not change",
    RuleId.GR5: "time column format HH:MM:SS.ssssss",
    RuleId.GR6: "more than 10 packets within 10 µs",
    RuleId.GR7: "no data for more than 10 s",
    RuleId.GR8: "unchanged data must keep stnum and advance sqnum by 1",
    RuleId.SR1: "SmpCnt outside [0,4799]",
    RuleId.SR2: "SmpCnt must increase by 1 up to 4799, then reset to 0",
    RuleId.SR3: "SmpCnt must not decrease before reaching 4799",
    RuleId.SR4: "dm, sm, type, appid and svid must stay identical",
    RuleId.SR5: "time column format HH:MM:SS.ssssss",
    RuleId.SR6: "inter-arrival outside [200 µs, 215 µs]",
    RuleId.SR7: "more than 12 packets within 2083 µs",
    RuleId.SR8: "SmpCnt must increase by 1 every message",
}


def describe_rule(rule: RuleId) -> str:
    """One-line description of the rule condition and its anomaly label."""
    return f"{_DESCRIPTIONS[rule]} → {LABEL_FOR_RULE[rule].text}"


def full_rules(protocol: Protocol) -> RuleSet:
    return frozenset(r for r in RuleId if r.protocol is protocol)


def _default_partial(protocol: Protocol) -> RuleSet:
    return frozenset(r for r in RuleId if r.protocol is protocol and r.ordinal <= 5)


LevelOverrides = dict[tuple[Protocol, TrainingLevel], RuleSet]


def rules_for_level(
    level: TrainingLevel,
    protocol: Protocol,
    overrides: LevelOverrides | None = None,
) -> RuleSet:
    """Materialize a training level as the set of active rule ids."""
    if overrides and (protocol, level) in overrides:
        return overrides[(protocol, level)]
    if level is TrainingLevel.WITHOUT:
        return frozenset()
    if level is TrainingLevel.PARTIAL:
        return _default_partial(protocol)
    return full_rules(protocol)


def parse_rule_list(items: list[str] | str, protocol: Protocol | None = None) -> RuleSet:
    """Parse "GR1,GR2" or a list of id strings into a RuleSet."""
    if isinstance(items, str):
        items = [p for p in (s.strip() for s in items.split(",")) if p]
    rules = set()
    for item in items:
        try:
            rule = RuleId(item.upper())
        except ValueError:
            raise ConfigError(f"unknown rule id: {item!r}") from None
        if protocol is not None and rule.protocol is not protocol:
            raise ConfigError(f"rule {rule.value} does not belong to protocol {protocol.value}")
        rules.add(rule)
    return frozenset(rules)


def load_level_overrides(path: str | Path) -> LevelOverrides:
    """Read training-level membership overrides from a config file."""
    overrides: LevelOverrides = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"line {lineno}: expected 'protocol.level = [...]'")
        try:
            proto_name, level_name = key.strip().lower().split(".")
            protocol = Protocol(proto_name)
            level = TrainingLevel(level_name)
        except ValueError:
            raise ConfigError(f"line {lineno}: unknown key {key.strip()!r}") from None
        if level is TrainingLevel.WITHOUT:
            raise ConfigError(f"line {lineno}: the 'without' level is fixed to the empty set")
        try:
            items = json.loads(value.strip())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"line {lineno}: bad rule list: {exc}") from None
        if not isinstance(items, list):
            raise ConfigError(f"line {lineno}: rule list must be a JSON array")
        overrides[(protocol, level)] = parse_rule_list(items, protocol)
    _check_nesting(overrides)
    return overrides


def _check_nesting(overrides: LevelOverrides) -> None:
    for protocol in Protocol:
        partial = rules_for_level(TrainingLevel.PARTIAL, protocol, overrides)
        full = rules_for_level(TrainingLevel.FULL, protocol, overrides)
        if not partial or not (partial < full):
            raise ConfigError(
                f"{protocol.value}: levels must nest strictly (without < partial < full)"
            )

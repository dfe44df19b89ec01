import pytest

from mcastids.errors import ConfigError
from mcastids.model import AnomalyLabel, Protocol
from mcastids.rulebook import (
    LABEL_FOR_RULE,
    RULES_FOR_LABEL,
    RuleId,
    TrainingLevel,
    describe_rule,
    full_rules,
    load_level_overrides,
    parse_rule_list,
    rules_for_level,
)


def test_sixteen_rule_ids():
    assert len(list(RuleId)) == 16
    assert {r.ordinal for r in RuleId} == set(range(1, 9))
    assert RuleId.GR3.protocol is Protocol.GOOSE
    assert RuleId.SR6.protocol is Protocol.SV


def test_levels_full_and_partial():
    assert rules_for_level(TrainingLevel.FULL, Protocol.GOOSE) == frozenset(
        {RuleId.GR1, RuleId.GR2, RuleId.GR3, RuleId.GR4, RuleId.GR5, RuleId.GR6, RuleId.GR7, RuleId.GR8}
    )
    assert rules_for_level(TrainingLevel.WITHOUT, Protocol.SV) == frozenset()
    assert rules_for_level(TrainingLevel.PARTIAL, Protocol.SV) == frozenset(
        {RuleId.SR1, RuleId.SR2, RuleId.SR3, RuleId.SR4, RuleId.SR5}
    )


@pytest.mark.parametrize("protocol", list(Protocol))
def test_levels_nest_strictly(protocol):
    without = rules_for_level(TrainingLevel.WITHOUT, protocol)
    partial = rules_for_level(TrainingLevel.PARTIAL, protocol)
    full = rules_for_level(TrainingLevel.FULL, protocol)
    assert without < partial < full


def test_rule_label_mapping_total():
    for rule in RuleId:
        label = LABEL_FOR_RULE[rule]
        assert label.protocol is rule.protocol
        assert rule in RULES_FOR_LABEL[label]
    for label in AnomalyLabel:
        assert RULES_FOR_LABEL[label], f"{label} has no rule"
    # SR8 restates SR2
    assert LABEL_FOR_RULE[RuleId.SR8] is LABEL_FOR_RULE[RuleId.SR2]
    assert set(RULES_FOR_LABEL[AnomalyLabel.SMPCNT_INCREASE]) == {RuleId.SR2, RuleId.SR8}


def test_describe_rule():
    assert describe_rule(RuleId.GR6) == "more than 10 packets within 10 µs → high data rate anomaly"
    assert describe_rule(RuleId.SR1) == "SmpCnt outside [0,4799] → SmpCnt range anomaly"
    assert describe_rule(RuleId.GR5).startswith("time column format HH:MM:SS.ssssss")
    for rule in RuleId:
        assert LABEL_FOR_RULE[rule].text in describe_rule(rule)


def test_parse_rule_list():
    assert parse_rule_list("GR1, gr2") == frozenset({RuleId.GR1, RuleId.GR2})
    with pytest.raises(ConfigError):
        parse_rule_list("GR9")
    with pytest.raises(ConfigError):
        parse_rule_list("SR1", Protocol.GOOSE)


def test_level_overrides(tmp_path):
    cfg = tmp_path / "levels.cfg"
    cfg.write_text(
        "# custom partial membership\n"
        'goose.partial = ["GR1", "GR2", "GR5", "GR6", "GR7"]\n'
        'sv.partial = ["SR1", "SR2"]\n'
    )
    overrides = load_level_overrides(cfg)
    assert rules_for_level(TrainingLevel.PARTIAL, Protocol.GOOSE, overrides) == frozenset(
        {RuleId.GR1, RuleId.GR2, RuleId.GR5, RuleId.GR6, RuleId.GR7}
    )
    assert rules_for_level(TrainingLevel.PARTIAL, Protocol.SV, overrides) == frozenset(
        {RuleId.SR1, RuleId.SR2}
    )
    # untouched levels keep their defaults
    assert rules_for_level(TrainingLevel.FULL, Protocol.GOOSE, overrides) == full_rules(Protocol.GOOSE)


@pytest.mark.parametrize(
    "body",
    [
        'goose.partial = ["SR1"]',                      # wrong protocol
        'goose.partial = ["GR1", "GR9"]',               # unknown id
        "goose.partial = GR1",                          # not a JSON array
        'goose.without = []',                           # without is fixed
        'goose.partial = []',                           # breaks strict nesting
        'sv.full = ["SR1"]',                            # full must contain partial
        "nonsense line",
    ],
)
def test_level_override_rejects(tmp_path, body):
    cfg = tmp_path / "levels.cfg"
    cfg.write_text(body + "\n")
    with pytest.raises(ConfigError):
        load_level_overrides(cfg)

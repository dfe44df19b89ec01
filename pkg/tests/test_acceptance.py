"""Acceptance gate: every criterion below prints one PASS line when it
holds at its stated tolerance. Run with `pytest tests/test_acceptance.py -v -s`.
"""

import random
import time

import pytest

from helpers import findings_as_sets, rand_goose_entries, rand_sv_entries
from mcastids.goose_rules import detect_goose_stream
from mcastids.ingest import decode_frame, encode_frame
from mcastids.errors import CodecError
from mcastids.metrics import ConfusionMatrix, compute_metrics, level_comparison
from mcastids.model import AnomalyLabel as L
from mcastids.model import MicroTimestamp, Protocol
from mcastids.rulebook import RuleId, TrainingLevel, full_rules
from mcastids.sv_rules import SvDetector, detect_sv_stream
from mcastids.synth import (
    AttackScenario,
    BenignProfile,
    ScenarioKind,
    generate_benign,
    inject,
    iter_benign_records,
)
from oracles import oracle_goose, oracle_sv

from helpers import BASE_US, goose, heartbeat_entries, sv, sv_seq_entries
from test_codec import random_goose, random_sv

TOL = 5e-3


def _ok(line):
    print(f"ACCEPTANCE {line}: PASS")


def test_criterion_1_metric_reproduction_sv():
    r = compute_metrics(ConfusionMatrix(49, 29, 1, 1))
    expected = {
        "tpr": 0.98,
        "fpr": 0.0333,
        "fnr": 0.02,
        "precision": 0.98,
        "accuracy": 0.975,
        "markedness": 0.9467,
        "informedness": 0.9467,
        "mcc": 0.9467,
    }
    for name, want in expected.items():
        assert getattr(r, name) == pytest.approx(want, abs=TOL), name
    _ok("1 (SV full-training metric reproduction, ±0.005)")


def test_criterion_2_metric_reproduction_goose():
    r = compute_metrics(ConfusionMatrix(44, 34, 1, 1))
    expected = {"tpr": 0.9778, "fpr": 0.0286, "accuracy": 0.975, "mcc": 0.9491}
    for name, want in expected.items():
        assert getattr(r, name) == pytest.approx(want, abs=TOL), name
    _ok("2 (GOOSE full-training metric reproduction, ±0.005)")


def test_criterion_3_level_deltas():
    deltas = level_comparison(
        {TrainingLevel.WITHOUT: 0.9125, TrainingLevel.PARTIAL: 0.95, TrainingLevel.FULL: 0.975}
    )
    assert deltas[0] == pytest.approx(3.75, abs=1e-9)
    assert deltas[1] == pytest.approx(2.5, abs=1e-9)
    _ok("3 (incremental accuracy +3.75/+2.50 percentage points)")


def test_criterion_4_oracle_equivalence():
    started = time.perf_counter()
    goose_rules = full_rules(Protocol.GOOSE)
    sv_rules_set = full_rules(Protocol.SV)
    rng = random.Random(20_240_601)
    streams = 1000
    for _ in range(streams):
        entries = rand_goose_entries(rng, max_len=200)
        got = findings_as_sets(detect_goose_stream(entries), len(entries))
        assert got == oracle_goose(entries, goose_rules)
    for _ in range(streams):
        entries = rand_sv_entries(rng, max_len=200)
        got = findings_as_sets(detect_sv_stream(entries), len(entries))
        assert got == oracle_sv(entries, sv_rules_set)
    elapsed = time.perf_counter() - started
    assert elapsed < 60.0
    _ok(f"4 (streaming == literal oracle on {2 * streams} random streams, {elapsed:.1f}s)")


GOOSE_PROFILES = [
    dict(duration_s=20.0, heartbeat_us=1_000_000, state_change_rate=0.0),
    dict(duration_s=20.0, heartbeat_us=500_000, state_change_rate=0.2),
    dict(duration_s=30.0, heartbeat_us=2_000_000, state_change_rate=0.4),
]
SV_PROFILES = [
    dict(duration_s=0.02, sv_rate=4800),
    dict(duration_s=0.02, sv_rate=5000),
    dict(duration_s=0.025, sv_rate=4700),
]
GOOSE_KINDS = (
    ScenarioKind.REPLAY,
    ScenarioKind.FALSE_DATA_INJECTION,
    ScenarioKind.DOS_FLOOD,
    ScenarioKind.DATA_GAP,
    ScenarioKind.FIELD_TAMPER,
    ScenarioKind.TIME_CORRUPTION,
)
SV_KINDS = GOOSE_KINDS + (ScenarioKind.COUNTER_JUMP, ScenarioKind.INTERVAL_JITTER)


def _detect_stream(stream):
    fn = detect_goose_stream if stream.protocol is Protocol.GOOSE else detect_sv_stream
    return fn(stream.entries())


def test_criterion_5_generator_detector_pairing():
    benign_runs = 0
    for protocol, profiles in ((Protocol.GOOSE, GOOSE_PROFILES), (Protocol.SV, SV_PROFILES)):
        for seed in range(102):
            profile = BenignProfile(protocol=protocol, **profiles[seed % len(profiles)])
            stream = generate_benign(profile, seed)
            assert _detect_stream(stream) == [], f"benign {protocol.value} seed {seed} flagged"
            benign_runs += 1

    scenario_runs = 0
    for protocol, kinds in ((Protocol.GOOSE, GOOSE_KINDS), (Protocol.SV, SV_KINDS)):
        for kind in kinds:
            for seed in range(10):
                base_profile = (
                    dict(duration_s=40.0, state_change_rate=0.1)
                    if protocol is Protocol.GOOSE
                    else dict(duration_s=0.05)
                )
                base = generate_benign(BenignProfile(protocol=protocol, **base_profile), seed)
                position = None if seed % 2 else (len(base) * (seed + 1)) // 12
                stream = inject(base, AttackScenario(kind=kind, position=position, seed=seed))
                got = findings_as_sets(_detect_stream(stream), len(stream))
                meta = stream.metadata["scenarios"][-1]
                injected = set(meta["injected"])
                declared = {L.parse(s) for s in meta["declared"]}
                # 100% recall of the declared labels at the declared positions
                assert any(declared <= got[i] for i in injected)
                assert all(got[i] == stream.truth[i] for i in injected)
                # zero false positives on records the rules leave untouched
                for i in range(len(stream)):
                    if not stream.truth[i]:
                        assert not got[i], f"{kind.value}: false positive at {i}"
                assert got == list(stream.truth)
                scenario_runs += 1
    _ok(f"5 (generator/detector pairing: {benign_runs} benign runs clean, "
        f"{scenario_runs} injections at exact truth)")


def test_criterion_6_boundary_suite():
    # smpcnt 4799 -> 0 wrap is compliant
    wrap = [(sv(BASE_US, smpcnt=4799), None), (sv(BASE_US + 208, smpcnt=0), None)]
    assert detect_sv_stream(wrap) == []

    # inter-arrival 200/215 in-band, 199/216 flagged
    for dt, flagged in ((200, False), (215, False), (199, True), (216, True)):
        entries = [(sv(BASE_US, smpcnt=1), None), (sv(BASE_US + dt, smpcnt=2), None)]
        got = findings_as_sets(detect_sv_stream(entries), 2)[1]
        assert (L.TIME_INTERVAL in got) is flagged, dt

    # 10 GOOSE packets in 10 µs pass, 11 are a burst
    assert detect_goose_stream(heartbeat_entries(10, step_us=1)) == []
    eleven = detect_goose_stream(heartbeat_entries(11, step_us=1))
    assert [f.index for f in eleven] == [10] and eleven[0].labels == {L.HIGH_DATA_RATE}

    # gap of exactly 10 s passes, one microsecond more is flagged
    at_limit = [(goose(BASE_US, sqnum=0), None), (goose(BASE_US + 10_000_000, sqnum=1), None)]
    assert detect_goose_stream(at_limit) == []
    over = [(goose(BASE_US, sqnum=0), None), (goose(BASE_US + 10_000_001, sqnum=1), None)]
    assert detect_goose_stream(over)[0].labels == {L.DATA_GAP}

    # 12 SV packets in 2083 µs pass, 13 are a burst (rule isolated because
    # sub-200 µs spacing necessarily violates the interval rule)
    only_sr7 = frozenset({RuleId.SR7})
    assert detect_sv_stream(sv_seq_entries(12, step_us=173), only_sr7) == []
    thirteen = detect_sv_stream(sv_seq_entries(13, step_us=173), only_sr7)
    assert [f.index for f in thirteen] == [12] and thirteen[0].labels == {L.DATA_RATE}
    _ok("6 (boundary suite exact at 4799/200/215/10-in-10µs/10s/12-in-2083µs)")


def test_criterion_7_codec_roundtrip_and_fuzz():
    rng = random.Random(424_242)
    for _ in range(10_000):
        record = random_goose(rng) if rng.random() < 0.5 else random_sv(rng)
        assert decode_frame(encode_frame(record)) == record

    fuzzed = 0
    frames = [encode_frame(random_goose(rng)) for _ in range(6)]
    frames += [encode_frame(random_sv(rng)) for _ in range(6)]
    for frame in frames:
        for cut in range(len(frame)):
            try:
                decode_frame(frame[:cut])
            except CodecError:
                fuzzed += 1
            else:  # a strict prefix can never be a valid frame
                raise AssertionError(f"truncation to {cut} bytes decoded")
    _ok(f"7 (codec: 10000 round trips, {fuzzed} truncations all structured errors)")


def test_criterion_8_throughput_one_million_sv_records():
    profile = BenignProfile(
        protocol=Protocol.SV, duration_s=208.4, start=MicroTimestamp(4 * 3600, 0)
    )
    total = round(profile.duration_s * profile.sv_rate)
    assert total >= 1_000_000
    detector = SvDetector()
    started = time.perf_counter()
    findings = 0
    for record in iter_benign_records(profile, 0):
        if detector.process(record, None):
            findings += 1
    elapsed = time.perf_counter() - started
    assert findings == 0
    assert elapsed < 10.0, f"{total} records took {elapsed:.2f}s"
    _ok(f"8 (throughput: {total} SV records streamed in {elapsed:.2f}s)")

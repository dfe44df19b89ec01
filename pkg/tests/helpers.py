"""Shared record builders and adversarial random stream generators."""

from __future__ import annotations

import random

from mcastids.model import (
    GOOSE_ETHERTYPE,
    SV_ETHERTYPE,
    GooseRecord,
    MacAddress,
    MicroTimestamp,
    SvRecord,
)

G_DM = MacAddress.parse("01:00:03:00:00:01")
G_SM = MacAddress.parse("27:34:31:00:00:02")
S_DM = MacAddress.parse("01:0c:cd:04:00:01")
S_SM = MacAddress.parse("aa:bb:cc:00:00:01")

ALT_MAC = MacAddress.parse("de:ad:be:ef:00:01")

BASE_US = 36_000_000_000  # 10:00:00


def mt(us: int) -> MicroTimestamp:
    return MicroTimestamp.from_micros(us)


def goose(
    t_us: int,
    stnum: int = 1,
    sqnum: int = 0,
    d1: bool = False,
    d2: bool = False,
    dm: MacAddress = G_DM,
    sm: MacAddress = G_SM,
    ethertype: int = GOOSE_ETHERTYPE,
    appid: int = 3,
    dataset: str = "DS1",
    goid: str = "GO1",
) -> GooseRecord:
    return GooseRecord(mt(t_us), dm, sm, ethertype, appid, dataset, goid, stnum, sqnum, d1, d2)


def sv(
    t_us: int,
    smpcnt: int = 0,
    dm: MacAddress = S_DM,
    sm: MacAddress = S_SM,
    ethertype: int = SV_ETHERTYPE,
    appid: int = 40,
    svid: str = "SV1",
) -> SvRecord:
    return SvRecord(mt(t_us), dm, sm, ethertype, appid, svid, smpcnt)


def heartbeat_entries(n: int, start_us: int = BASE_US, step_us: int = 1_000_000, stnum: int = 1):
    """n compliant heartbeats: constant stnum, sqnum 0..n-1."""
    return [(goose(start_us + k * step_us, stnum=stnum, sqnum=k), None) for k in range(n)]


def sv_seq_entries(n: int, start_us: int = BASE_US, step_us: int = 208, start_cnt: int = 0):
    """n SV records with +1 counters and a fixed inter-arrival."""
    return [(sv(start_us + k * step_us, smpcnt=(start_cnt + k) % 4800), None) for k in range(n)]


_BAD_TIMES = ("10:00:00.12", "24:00:00.000000", "10:61:00.000000", "garbage", "10:00:00", "1:00:00.000000")

_GOOSE_DT_POOL = (0, 0, 1, 2, 5, 9, 10, 11, 200, 1_000_000, 1_000_000, 9_999_999, 10_000_000, 10_000_001, 11_000_000)
_SV_DT_POOL = (0, 1, 150, 199, 200, 207, 208, 208, 209, 215, 216, 250, 2083, 5_000, 11_000_000)


def _raw_for(rng: random.Random, record) -> str | None:
    roll = rng.random()
    if roll < 0.08:
        return rng.choice(_BAD_TIMES)
    if roll < 0.18:
        return record.time.render()
    return None


def rand_goose_entries(rng: random.Random, max_len: int = 200):
    """Adversarial but time-ordered GOOSE stream mixing all rule triggers."""
    n = rng.randint(1, max_len)
    t = BASE_US + rng.randrange(0, 1_000_000)
    stnum, sqnum = rng.randint(1, 5), rng.randint(0, 3)
    d1 = d2 = False
    dm, sm, appid, dataset, goid = G_DM, G_SM, 3, "DS1", "GO1"
    entries = []
    rec = goose(t, stnum, sqnum, d1, d2, dm, sm, GOOSE_ETHERTYPE, appid, dataset, goid)
    entries.append((rec, _raw_for(rng, rec)))
    for _ in range(n - 1):
        t += rng.choice(_GOOSE_DT_POOL)
        move = rng.random()
        if move < 0.35:  # compliant heartbeat
            sqnum += 1
        elif move < 0.50:  # compliant state change
            stnum, sqnum, d1 = stnum + 1, 0, not d1
        elif move < 0.60:  # replay
            pass
        elif move < 0.70:  # sqnum skip or rewind
            sqnum = max(0, sqnum + rng.choice((-3, 2, 5)))
        elif move < 0.78:  # stnum decrease
            stnum = max(0, stnum - rng.randint(1, 2))
        elif move < 0.86:  # broken state change
            d2 = not d2
            sqnum += rng.choice((0, 1, 3))
        else:  # attribute tamper (sometimes reverted later by chance)
            which = rng.randrange(5)
            if which == 0:
                sm = rng.choice((G_SM, ALT_MAC))
            elif which == 1:
                dm = rng.choice((G_DM, ALT_MAC))
            elif which == 2:
                appid = rng.choice((3, 7))
            elif which == 3:
                dataset = rng.choice(("DS1", "DS2"))
            else:
                goid = rng.choice(("GO1", "GO9"))
        rec = goose(t, stnum, sqnum, d1, d2, dm, sm, GOOSE_ETHERTYPE, appid, dataset, goid)
        entries.append((rec, _raw_for(rng, rec)))
    return entries


def rand_sv_entries(rng: random.Random, max_len: int = 200):
    """Adversarial but time-ordered SV stream mixing all rule triggers."""
    n = rng.randint(1, max_len)
    t = BASE_US + rng.randrange(0, 1_000_000)
    cnt = rng.randint(0, 4799)
    dm, sm, appid, svid = S_DM, S_SM, 40, "SV1"
    entries = []
    rec = sv(t, cnt, dm, sm, SV_ETHERTYPE, appid, svid)
    entries.append((rec, _raw_for(rng, rec)))
    for _ in range(n - 1):
        t += rng.choice(_SV_DT_POOL)
        move = rng.random()
        if move < 0.55:  # compliant +1 with wrap
            cnt = 0 if cnt >= 4799 else cnt + 1
        elif move < 0.65:  # stuck counter (replay)
            pass
        elif move < 0.75:  # jump
            cnt = rng.choice((cnt + 2, cnt + 50, 4799, 4800, 5000, 60000))
            cnt = min(cnt, 65535)
        elif move < 0.85:  # decrease
            cnt = max(0, cnt - rng.randint(1, 100))
        else:  # field tamper
            which = rng.randrange(4)
            if which == 0:
                sm = rng.choice((S_SM, ALT_MAC))
            elif which == 1:
                dm = rng.choice((S_DM, ALT_MAC))
            elif which == 2:
                appid = rng.choice((40, 41))
            else:
                svid = rng.choice(("SV1", "SV2"))
        rec = sv(t, cnt, dm, sm, SV_ETHERTYPE, appid, svid)
        entries.append((rec, _raw_for(rng, rec)))
    return entries


def findings_as_sets(findings, n: int):
    """Per-record label sets from a findings list."""
    out = [frozenset()] * n
    for f in findings:
        out[f.index] = out[f.index] | f.labels
    return out

import io
import random

import pytest

from helpers import goose, sv
from mcastids.errors import RowError, SchemaError
from mcastids.ingest import parse_csv_goose, parse_csv_sv, render_csv, write_csv
from mcastids.model import GOOSE_ETHERTYPE, MacAddress, MicroTimestamp, Protocol, SENTINEL_TIME

GOOSE_HEADER = "Time,DM,SM,Type,APPID,Dataset,GoID,StNum,SqNum,Data1,Data2"
SV_HEADER = "Time,DM,SM,Type,APPID,SvID,SmpCnt"


def test_parse_goose_row():
    body = GOOSE_HEADER + "\n10:00:00.000100,01:00:03:00:00:01,27:34:31:00:00:02,88b8,3,DS1,GO1,1,0,0,0\n"
    entries = parse_csv_goose(body.encode())
    assert len(entries) == 1
    record, raw = entries[0]
    assert raw == "10:00:00.000100"
    assert record.appid == 3
    assert record.ethertype == GOOSE_ETHERTYPE
    assert record.stnum == 1 and record.sqnum == 0
    assert record.dm == MacAddress.parse("01:00:03:00:00:01")
    assert record.sm == MacAddress.parse("27:34:31:00:00:02")
    assert record.time == MicroTimestamp.parse("10:00:00.000100")
    assert record.data1 is False and record.data2 is False


def test_parse_goose_empty_file_with_header():
    assert parse_csv_goose((GOOSE_HEADER + "\n").encode()) == []


def test_parse_goose_header_mismatch():
    with pytest.raises(SchemaError):
        parse_csv_goose(b"Time,DM,SM\n")
    with pytest.raises(SchemaError):
        parse_csv_goose(b"")
    with pytest.raises(SchemaError):
        parse_csv_goose((SV_HEADER + "\n").encode())


def test_parse_goose_header_case_insensitive():
    header = "time,dm,sm,TYPE,appid,dataset,goid,stnum,sqnum,DATA1,data2"
    assert parse_csv_goose((header + "\n").encode()) == []


def test_parse_goose_bad_counter_reports_row():
    body = (
        GOOSE_HEADER + "\n"
        "10:00:00.000000,01:00:03:00:00:01,27:34:31:00:00:02,88b8,3,DS1,GO1,1,0,0,0\n"
        "10:00:01.000000,01:00:03:00:00:01,27:34:31:00:00:02,88b8,3,DS1,GO1,x,1,0,0\n"
    )
    with pytest.raises(RowError) as err:
        parse_csv_goose(body.encode())
    assert err.value.row == 3


def test_parse_goose_unparseable_time_kept_for_the_detector():
    body = GOOSE_HEADER + "\nnot-a-time,01:00:03:00:00:01,27:34:31:00:00:02,88b8,3,DS1,GO1,1,0,0,0\n"
    [(record, raw)] = parse_csv_goose(body.encode())
    assert raw == "not-a-time"
    assert record.time == SENTINEL_TIME


def test_parse_sv_row_and_out_of_range_counter():
    body = SV_HEADER + "\n10:00:00.000000,01:0c:cd:04:00:01,aa:bb:cc:00:00:01,88ba,40,SV1,4799\n"
    [(record, _)] = parse_csv_sv(body.encode())
    assert record.smpcnt == 4799 and record.appid == 40

    over = SV_HEADER + "\n10:00:00.000000,01:0c:cd:04:00:01,aa:bb:cc:00:00:01,88ba,40,SV1,4800\n"
    [(record, _)] = parse_csv_sv(over.encode())
    assert record.smpcnt == 4800  # accepted at ingest, flagged by the detector

    negative = SV_HEADER + "\n10:00:00.000000,01:0c:cd:04:00:01,aa:bb:cc:00:00:01,88ba,40,SV1,-1\n"
    with pytest.raises(RowError):
        parse_csv_sv(negative.encode())


def test_parse_sv_wrong_column_count():
    body = SV_HEADER + "\n10:00:00.000000,01:0c:cd:04:00:01,aa:bb:cc:00:00:01,88ba,40,SV1\n"
    with pytest.raises(RowError):
        parse_csv_sv(body.encode())


def _random_goose_entries(rng, n):
    entries = []
    t = 36_000_000_000
    for _ in range(n):
        t += rng.randrange(0, 2_000_000)
        record = goose(
            t,
            stnum=rng.randrange(2**32),
            sqnum=rng.randrange(2**32),
            d1=rng.random() < 0.5,
            d2=rng.random() < 0.5,
            appid=rng.randrange(2**16),
            dataset=rng.choice(("DS1", "data,with,commas", 'quo"ted', "Ünïcode")),
            goid=rng.choice(("GO1", "GO two", "")),
        )
        raw = None if rng.random() < 0.5 else record.time.render()
        if rng.random() < 0.1:
            raw = "junk-time"
        entries.append((record, raw))
    return entries


def test_goose_csv_roundtrip_randomized():
    rng = random.Random(2024)
    for _ in range(25):
        entries = _random_goose_entries(rng, rng.randint(0, 40))
        text = render_csv(Protocol.GOOSE, entries)
        parsed = parse_csv_goose(text.encode())
        expect = [
            (r if raw is None or raw == r.time.render() else None, raw if raw is not None else r.time.render())
            for r, raw in entries
        ]
        assert len(parsed) == len(entries)
        for (got_rec, got_raw), (want_rec, want_raw), (orig, _) in zip(parsed, expect, entries):
            assert got_raw == want_raw
            if want_rec is not None:
                assert got_rec == want_rec
            else:  # junk time parses to the sentinel, everything else survives
                assert got_rec.time == SENTINEL_TIME
                assert got_rec.stnum == orig.stnum and got_rec.goid == orig.goid


def test_sv_csv_roundtrip():
    entries = [(sv(36_000_000_000 + 208 * k, smpcnt=k), None) for k in range(50)]
    buf = io.StringIO()
    write_csv(buf, Protocol.SV, entries)
    parsed = parse_csv_sv(buf.getvalue().encode())
    assert [r for r, _ in parsed] == [r for r, _ in entries]
    assert all(raw == r.time.render() for r, raw in parsed)

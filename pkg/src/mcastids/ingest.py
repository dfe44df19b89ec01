"""Feature-log CSV parsing/writing and the canonical binary frame codec.

CSV schemas (first row is the header, matched case-insensitively):

    GOOSE: Time,DM,SM,Type,APPID,Dataset,GoID,StNum,SqNum,Data1,Data2
    SV:    Time,DM,SM,Type,APPID,SvID,SmpCnt

A row whose time text is not HH:MM:SS.ssssss still parses; the record
gets a placeholder time and the raw text is preserved so the
time-format rules (not the parser) flag it.

Binary frame layout, big-endian throughout:

    bytes 0-5   destination MAC
    bytes 6-11  source MAC
    bytes 12-13 EtherType (0x88B8 GOOSE | 0x88BA SV)
    bytes 14-15 APPID
    bytes 16-17 PDU length = number of bytes following offset 17
    bytes 18-21 seconds of day
    bytes 22-25 microseconds

followed by TLVs (1-byte tag, 1-byte short-form length, value),
ascending tag order, each tag exactly once:

    GOOSE: 0x01 dataset (UTF-8), 0x02 goID (UTF-8), 0x03 stNum (4),
           0x04 sqNum (4), 0x05 data1 (1, 0|1), 0x06 data2 (1, 0|1)
    SV:    0x01 svID (UTF-8), 0x02 smpCnt (2)

A frame stream container is a sequence of [4-byte length][frame].
Frames carry no raw time text, so only canonically rendered times
survive a binary round trip.
"""

from __future__ import annotations

import csv
import io
import struct
from typing import BinaryIO, Iterable, TextIO

from .errors import (
    EncodeError,
    RowError,
    SchemaError,
    TlvError,
    TruncationError,
    UnknownKindError,
)
from .model import (
    GOOSE_ETHERTYPE,
    SENTINEL_TIME,
    SV_ETHERTYPE,
    GooseRecord,
    MacAddress,
    MicroTimestamp,
    Protocol,
    SvRecord,
    validate_time_format,
)

FrameKind = Protocol

GOOSE_COLUMNS = ("Time", "DM", "SM", "Type", "APPID", "Dataset", "GoID", "StNum", "SqNum", "Data1", "Data2")
SV_COLUMNS = ("Time", "DM", "SM", "Type", "APPID", "SvID", "SmpCnt")

GooseEntry = tuple[GooseRecord, str]
SvEntry = tuple[SvRecord, str]


def frame_kind(ethertype: int) -> Protocol:
    if ethertype == GOOSE_ETHERTYPE:
        return Protocol.GOOSE
    if ethertype == SV_ETHERTYPE:
        return Protocol.SV
    raise UnknownKindError(f"EtherType 0x{ethertype:04x} is neither GOOSE nor SV")


def columns_for(protocol: Protocol) -> tuple[str, ...]:
    return GOOSE_COLUMNS if protocol is Protocol.GOOSE else SV_COLUMNS


# ---------------------------------------------------------------------------
# CSV parsing


def _text_reader(source: bytes | BinaryIO | TextIO):
    if isinstance(source, bytes):
        return io.StringIO(source.decode("utf-8"))
    if isinstance(source, io.TextIOBase):
        return source
    return io.TextIOWrapper(source, encoding="utf-8", newline="")

def _check_header(row: list[str] | None, expected: tuple[str, ...]) -> None:
    if row is None:
        raise SchemaError("empty input: missing header row")
    got = [c.strip().casefold() for c in row]
    if got != [c.casefold() for c in expected]:
        raise SchemaError(f"header {row!r} does not match schema {','.join(expected)}")


def _parse_time(raw: str) -> MicroTimestamp:
    if validate_time_format(raw):
        return MicroTimestamp.parse(raw)
    return SENTINEL_TIME


def _parse_mac(text: str, line: int, col: str) -> MacAddress:
    try:
        return MacAddress.parse(text.strip().lower())
    except ValueError as exc:
        raise RowError(f"{col}: {exc}", line) from None


def _parse_hex16(text: str, line: int, col: str) -> int:
    try:
        value = int(text.strip(), 16)
    except ValueError:
        raise RowError(f"{col}: not a hex value: {text!r}", line) from None
    if not 0 <= value <= 0xFFFF:
        raise RowError(f"{col}: out of 16-bit range: {text!r}", line)
    return value


def _parse_uint(text: str, bits: int, line: int, col: str) -> int:
    try:
        value = int(text.strip(), 10)
    except ValueError:
        raise RowError(f"{col}: not an integer: {text!r}", line) from None
    if value < 0:
        raise RowError(f"{col}: negative value in unsigned field: {text!r}", line)
    if value >= 1 << bits:
        raise RowError(f"{col}: out of {bits}-bit range: {text!r}", line)
    return value


def _parse_bool(text: str, line: int, col: str) -> bool:
    t = text.strip().casefold()
    if t in ("0", "false"):
        return False
    if t in ("1", "true"):
        return True
    raise RowError(f"{col}: expected 0/1, got {text!r}", line)


def parse_csv_goose(source: bytes | BinaryIO | TextIO) -> list[GooseEntry]:
    """Parse a GOOSE feature log; order preserved, raw time text retained."""
    reader = csv.reader(_text_reader(source))
    _check_header(next(reader, None), GOOSE_COLUMNS)
    entries: list[GooseEntry] = []
    for row in reader:
        line = reader.line_num
        if len(row) != len(GOOSE_COLUMNS):
            raise RowError(f"expected {len(GOOSE_COLUMNS)} columns, got {len(row)}", line)
        raw_time = row[0]
        record = GooseRecord(
            time=_parse_time(raw_time),
            dm=_parse_mac(row[1], line, "DM"),
            sm=_parse_mac(row[2], line, "SM"),
            ethertype=_parse_hex16(row[3], line, "Type"),
            appid=_parse_uint(row[4], 16, line, "APPID"),
            dataset=row[5],
            goid=row[6],
            stnum=_parse_uint(row[7], 32, line, "StNum"),
            sqnum=_parse_uint(row[8], 32, line, "SqNum"),
            data1=_parse_bool(row[9], line, "Data1"),
            data2=_parse_bool(row[10], line, "Data2"),
        )
        entries.append((record, raw_time))
    return entries


def parse_csv_sv(source: bytes | BinaryIO | TextIO) -> list[SvEntry]:
    """Parse an SV feature log; smpcnt outside [0,4799] is accepted here."""
    reader = csv.reader(_text_reader(source))
    _check_header(next(reader, None), SV_COLUMNS)
    entries: list[SvEntry] = []
    for row in reader:
        line = reader.line_num
        if len(row) != len(SV_COLUMNS):
            raise RowError(f"expected {len(SV_COLUMNS)} columns, got {len(row)}", line)
        raw_time = row[0]
        record = SvRecord(
            time=_parse_time(raw_time),
            dm=_parse_mac(row[1], line, "DM"),
            sm=_parse_mac(row[2], line, "SM"),
            ethertype=_parse_hex16(row[3], line, "Type"),
            appid=_parse_uint(row[4], 16, line, "APPID"),
            svid=row[5],
            smpcnt=_parse_uint(row[6], 16, line, "SmpCnt"),
        )
        entries.append((record, raw_time))
    return entries


def parse_csv(source: bytes | BinaryIO | TextIO, protocol: Protocol):
    return parse_csv_goose(source) if protocol is Protocol.GOOSE else parse_csv_sv(source)


# ---------------------------------------------------------------------------
# CSV writing


def _row_for(record: GooseRecord | SvRecord, raw_time: str | None) -> list[str]:
    time_text = raw_time if raw_time is not None else record.time.render()
    if isinstance(record, GooseRecord):
        return [
            time_text,
            str(record.dm),
            str(record.sm),
            f"{record.ethertype:04x}",
            str(record.appid),
            record.dataset,
            record.goid,
            str(record.stnum),
            str(record.sqnum),
            "1" if record.data1 else "0",
            "1" if record.data2 else "0",
        ]
    return [
        time_text,
        str(record.dm),
        str(record.sm),
        f"{record.ethertype:04x}",
        str(record.appid),
        record.svid,
        str(record.smpcnt),
    ]


def write_csv(sink: TextIO, protocol: Protocol, entries: Iterable[tuple[object, str | None]]) -> None:
    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(columns_for(protocol))
    for record, raw_time in entries:
        writer.writerow(_row_for(record, raw_time))


def render_csv(protocol: Protocol, entries: Iterable[tuple[object, str | None]]) -> str:
    buf = io.StringIO()
    write_csv(buf, protocol, entries)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Binary frame codec

_HEADER = struct.Struct(">6s6sHHHII")
HEADER_LEN = _HEADER.size  # 26

_GOOSE_TAGS = (0x01, 0x02, 0x03, 0x04, 0x05, 0x06)
_SV_TAGS = (0x01, 0x02)


def _tlv(tag: int, value: bytes) -> bytes:
    if len(value) > 127:
        raise EncodeError(f"TLV 0x{tag:02x} value exceeds short-form length: {len(value)} bytes")
    return bytes((tag, len(value))) + value


def _text_tlv(tag: int, text: str, name: str) -> bytes:
    data = text.encode("utf-8")
    if len(data) > 127:
        raise EncodeError(f"{name} exceeds 127 UTF-8 bytes")
    return _tlv(tag, data)


def encode_frame(record: GooseRecord | SvRecord) -> bytes:
    """Serialize a record to the canonical frame; deterministic output."""
    if isinstance(record, GooseRecord):
        if record.ethertype != GOOSE_ETHERTYPE:
            raise EncodeError("GOOSE record must carry EtherType 0x88B8 to be frame-encodable")
        body = b"".join(
            (
                _text_tlv(0x01, record.dataset, "dataset"),
                _text_tlv(0x02, record.goid, "goID"),
                _tlv(0x03, record.stnum.to_bytes(4, "big")),
                _tlv(0x04, record.sqnum.to_bytes(4, "big")),
                _tlv(0x05, bytes((int(record.data1),))),
                _tlv(0x06, bytes((int(record.data2),))),
            )
        )
    elif isinstance(record, SvRecord):
        if record.ethertype != SV_ETHERTYPE:
            raise EncodeError("SV record must carry EtherType 0x88BA to be frame-encodable")
        body = b"".join(
            (
                _text_tlv(0x01, record.svid, "svID"),
                _tlv(0x02, record.smpcnt.to_bytes(2, "big")),
            )
        )
    else:
        raise EncodeError(f"cannot encode {type(record).__name__}")
    return (
        _HEADER.pack(
            record.dm.octets,
            record.sm.octets,
            record.ethertype,
            record.appid,
            8 + len(body),
            record.time.seconds,
            record.time.micros,
        )
        + body
    )


def _walk_tlvs(body: bytes, tags: tuple[int, ...]) -> list[bytes]:
    values: list[bytes] = []
    offset = 0
    for tag in tags:
        if offset + 2 > len(body):
            raise TlvError(f"body ends before TLV 0x{tag:02x}")
        got_tag, length = body[offset], body[offset + 1]
        if got_tag != tag:
            raise TlvError(f"expected TLV 0x{tag:02x}, found 0x{got_tag:02x}")
        if length & 0x80:
            raise TlvError("long-form TLV length is not allowed")
        offset += 2
        if offset + length > len(body):
            raise TlvError(f"TLV 0x{tag:02x} length overruns the frame body")
        values.append(body[offset : offset + length])
        offset += length
    if offset != len(body):
        raise TlvError(f"{len(body) - offset} trailing bytes after the last TLV")
    return values


def _tlv_text(value: bytes, name: str) -> str:
    try:
        return value.decode("utf-8")
    except UnicodeDecodeError:
        raise TlvError(f"{name} is not valid UTF-8") from None


def _tlv_uint(value: bytes, size: int, name: str) -> int:
    if len(value) != size:
        raise TlvError(f"{name} must be {size} bytes, got {len(value)}")
    return int.from_bytes(value, "big")


def _tlv_bool(value: bytes, name: str) -> bool:
    if len(value) != 1 or value[0] not in (0, 1):
        raise TlvError(f"{name} must be a single 0|1 byte")
    return bool(value[0])


def decode_frame(buf: bytes) -> GooseRecord | SvRecord:
    """Decode one canonical frame; never reads past the buffer."""
    if len(buf) < HEADER_LEN:
        raise TruncationError(f"buffer of {len(buf)} bytes is below the {HEADER_LEN}-byte header")
    dm, sm, ethertype, appid, pdu_len, seconds, micros = _HEADER.unpack_from(buf)
    kind = frame_kind(ethertype)
    total = 18 + pdu_len
    if pdu_len < 8:
        raise TlvError(f"PDU length {pdu_len} cannot cover the time fields")
    if len(buf) < total:
        raise TruncationError(f"frame declares {total} bytes but buffer holds {len(buf)}")
    if len(buf) > total:
        raise TlvError(f"{len(buf) - total} bytes beyond the declared frame length")
    try:
        time = MicroTimestamp(seconds, micros)
    except ValueError as exc:
        raise TlvError(str(exc)) from None
    body = buf[HEADER_LEN:total]
    if kind is Protocol.GOOSE:
        dataset, goid, stnum, sqnum, data1, data2 = _walk_tlvs(body, _GOOSE_TAGS)
        return GooseRecord(
            time=time,
            dm=MacAddress(dm),
            sm=MacAddress(sm),
            ethertype=ethertype,
            appid=appid,
            dataset=_tlv_text(dataset, "dataset"),
            goid=_tlv_text(goid, "goID"),
            stnum=_tlv_uint(stnum, 4, "stNum"),
            sqnum=_tlv_uint(sqnum, 4, "sqNum"),
            data1=_tlv_bool(data1, "data1"),
            data2=_tlv_bool(data2, "data2"),
        )
    svid, smpcnt = _walk_tlvs(body, _SV_TAGS)
    return SvRecord(
        time=time,
        dm=MacAddress(dm),
        sm=MacAddress(sm),
        ethertype=ethertype,
        appid=appid,
        svid=_tlv_text(svid, "svID"),
        smpcnt=_tlv_uint(smpcnt, 2, "smpCnt"),
    )


# ---------------------------------------------------------------------------
# Length-prefixed frame stream container


def write_frames(sink: BinaryIO, records: Iterable[GooseRecord | SvRecord]) -> None:
    for record in records:
        frame = encode_frame(record)
        sink.write(struct.pack(">I", len(frame)))
        sink.write(frame)


def read_frames(source: BinaryIO) -> list[GooseRecord | SvRecord]:
    records: list[GooseRecord | SvRecord] = []
    while True:
        prefix = source.read(4)
        if not prefix:
            return records
        if len(prefix) < 4:
            raise TruncationError("container ends inside a length prefix")
        length = struct.unpack(">I", prefix)[0]
        frame = source.read(length)
        if len(frame) < length:
            raise TruncationError("container ends inside a frame")
        records.append(decode_frame(frame))

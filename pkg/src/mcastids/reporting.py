"""Serialization of findings, label sidecars and stream metadata.

Findings report (JSON lines, one object per flagged record):

    {"index": 7, "stream_key": {"sm": "...", "dm": "...", "appid": 3},
     "labels": ["sqnum anomaly"], "time": "10:00:07.000000"}

Labels sidecar (JSON lines, one object per record, empty list = benign):

    {"index": 0, "labels": []}

The stream id is the SHA-256 of the canonical CSV serialization, so it
can be recomputed from any faithful copy of the stream.
"""

from __future__ import annotations

import hashlib
import json
from typing import Iterable, TextIO

from .errors import EvalError
from .ingest import render_csv
from .model import AnomalyLabel, Finding, MacAddress, MicroTimestamp, Protocol


def finding_to_dict(finding: Finding) -> dict:
    sm, dm, appid = finding.stream_key
    return {
        "index": finding.index,
        "stream_key": {"sm": str(sm), "dm": str(dm), "appid": appid},
        "labels": sorted(label.value for label in finding.labels),
        "time": finding.time.render(),
    }


def write_findings(sink: TextIO, findings: Iterable[Finding]) -> None:
    for finding in findings:
        sink.write(json.dumps(finding_to_dict(finding)) + "\n")


def read_findings(source: TextIO) -> list[Finding]:
    findings = []
    for lineno, line in enumerate(source, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
            key = obj["stream_key"]
            findings.append(
                Finding(
                    index=obj["index"],
                    labels=frozenset(AnomalyLabel.parse(s) for s in obj["labels"]),
                    stream_key=(
                        MacAddress.parse(key["sm"]),
                        MacAddress.parse(key["dm"]),
                        key["appid"],
                    ),
                    time=MicroTimestamp.parse(obj["time"]),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise EvalError(f"findings line {lineno}: {exc}") from None
    return findings


def write_labels_sidecar(sink: TextIO, truth: Iterable[frozenset]) -> None:
    for index, labels in enumerate(truth):
        row = {"index": index, "labels": sorted(label.value for label in labels)}
        sink.write(json.dumps(row) + "\n")


def read_labels_sidecar(source: TextIO) -> list[frozenset]:
    truth: list[frozenset] = []
    for lineno, line in enumerate(source, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
            if obj["index"] != len(truth):
                raise EvalError(f"sidecar line {lineno}: indices must be contiguous from 0")
            truth.append(frozenset(AnomalyLabel.parse(s) for s in obj["labels"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise EvalError(f"sidecar line {lineno}: {exc}") from None
    return truth


def stream_id(protocol: Protocol, entries: Iterable[tuple[object, str | None]]) -> str:
    """Content hash of the stream's canonical CSV form."""
    return hashlib.sha256(render_csv(protocol, entries).encode("utf-8")).hexdigest()


def labels_to_bool(truth: Iterable[frozenset]) -> list[bool]:
    return [bool(labels) for labels in truth]


def findings_to_label_sets(findings: Iterable[Finding], record_count: int) -> list[frozenset]:
    """Expand a findings list into one label set per record."""
    out: list[frozenset] = [frozenset()] * record_count
    for finding in findings:
        if not 0 <= finding.index < record_count:
            raise EvalError(
                f"finding index {finding.index} outside stream of {record_count} records"
            )
        out[finding.index] = out[finding.index] | finding.labels
    return out

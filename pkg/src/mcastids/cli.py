"""Command-line entry point: generate, detect, evaluate, rules.

Exit codes: 0 success, 64 usage, 2 I/O, 3 input order/schema,
4 evaluation mismatch.
"""

from __future__ import annotations

import argparse
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

from .errors import (
    CodecError,
    ConfigError,
    EvalError,
    InjectError,
    OrderError,
    ProfileError,
    RowError,
    SchemaError,
)
from .goose_rules import GooseThresholds, detect_goose_stream
from .ingest import GOOSE_COLUMNS, SV_COLUMNS, parse_csv, read_frames, write_csv, write_frames
from .metrics import compute_metrics, confusion, level_comparison
from .model import GooseRecord, MicroTimestamp, Protocol
from .reporting import (
    findings_to_label_sets,
    read_findings,
    read_labels_sidecar,
    stream_id,
    write_findings,
    write_labels_sidecar,
)
from .rulebook import (
    RULES_FOR_LABEL,
    RuleId,
    TrainingLevel,
    describe_rule,
    load_level_overrides,
    parse_rule_list,
    rules_for_level,
)
from .sv_rules import SvThresholds, detect_sv_stream
from .synth import AttackScenario, BenignProfile, ScenarioKind, generate_benign, inject, scale_to_counts

EX_OK = 0
EX_IO = 2
EX_INPUT = 3
EX_EVAL = 4
EX_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EX_USAGE, f"{self.prog}: error: {message}\n")


def _add_detector_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("detector")
    group.add_argument("--level", choices=[l.value for l in TrainingLevel], default=None,
                       help="training level selecting the active rules (default: full)")
    group.add_argument("--rules", default=None, help="explicit rule list, e.g. GR1,GR2,GR6")
    group.add_argument("--config", default=None, help="rule-set config file with level overrides")
    group.add_argument("--mode", choices=["strict", "per-stream"], default="strict",
                       help="attribute-consistency comparison mode")
    group.add_argument("--gr8-literal", action="store_true",
                       help="use the published changed-data wording for GR8")
    group.add_argument("--goose-burst-count", type=int, default=10)
    group.add_argument("--goose-burst-window-us", type=int, default=10)
    group.add_argument("--goose-gap-us", type=int, default=10_000_000)
    group.add_argument("--sv-interval-min-us", type=int, default=200)
    group.add_argument("--sv-interval-max-us", type=int, default=215)
    group.add_argument("--sv-burst-count", type=int, default=12)
    group.add_argument("--sv-burst-window-us", type=int, default=2083)


def _build_parser() -> _Parser:
    parser = _Parser(prog="mcastids", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", parents=[], help="write a synthetic labeled stream")
    gen.add_argument("--protocol", choices=[p.value for p in Protocol], required=True)
    gen.add_argument("--duration", type=float, default=1.0, help="stream duration in seconds")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--start", default="10:00:00.000000", help="first timestamp (HH:MM:SS.ssssss)")
    gen.add_argument("--heartbeat-us", type=int, default=1_000_000)
    gen.add_argument("--state-change-rate", type=float, default=0.0, help="GOOSE state changes per second")
    gen.add_argument("--sv-rate", type=int, default=4800, help="SV samples per second")
    gen.add_argument("--scenario", choices=[k.value for k in ScenarioKind], default=None)
    gen.add_argument("--position", type=int, default=None, help="scenario base record index")
    gen.add_argument("--count", type=int, default=None, help="dos-flood packet count")
    gen.add_argument("--span-us", type=int, default=None, help="dos-flood burst spread")
    gen.add_argument("--shift-us", type=int, default=None, help="data-gap / interval-jitter shift")
    gen.add_argument("--target", type=int, default=None, help="counter-jump forged smpcnt")
    gen.add_argument("--field", default=None, help="field-tamper target or FDI mode")
    gen.add_argument("--counts", default=None, metavar="P,N",
                     help="build a dataset with exactly P anomalous and N normal records")
    gen.add_argument("--format", choices=["csv", "bin", "both"], default="csv")
    gen.add_argument("--reproducible", action="store_true",
                     help="omit the wall-clock timestamp from metadata")
    gen.add_argument("-o", "--output", required=True, help="output directory")
    gen.set_defaults(func=cmd_generate)

    det = sub.add_parser("detect", help="run the anomaly rules over a stream")
    det.add_argument("-i", "--input", required=True, help="stream file (.csv or binary container)")
    det.add_argument("--protocol", choices=["auto"] + [p.value for p in Protocol], default="auto")
    det.add_argument("-o", "--output", default=None, help="findings file (default: stdout)")
    _add_detector_flags(det)
    det.set_defaults(func=cmd_detect)

    ev = sub.add_parser("evaluate", help="score detection quality against ground truth")
    ev.add_argument("--stream", required=True, help="stream file (.csv or binary container)")
    ev.add_argument("--labels", required=True, help="ground-truth sidecar (JSON lines)")
    ev.add_argument("--protocol", choices=["auto"] + [p.value for p in Protocol], default="auto")
    ev.add_argument("--findings", default=None, help="score a precomputed findings file")
    ev.add_argument("--levels", default=None,
                    help="comma list of training levels to compare, e.g. without,partial,full")
    ev.add_argument("--metadata", default=None, help="metadata.json to cross-check the stream id")
    ev.add_argument("--json", dest="json_out", default=None, help="write the report as JSON")
    _add_detector_flags(ev)
    ev.set_defaults(func=cmd_evaluate)

    ru = sub.add_parser("rules", help="print the rule catalog")
    ru.add_argument("--protocol", choices=[p.value for p in Protocol], default=None)
    ru.add_argument("--level", choices=[l.value for l in TrainingLevel], default=None)
    ru.add_argument("--config", default=None)
    ru.set_defaults(func=cmd_rules)

    return parser


# ---------------------------------------------------------------------------
# Shared helpers


def _thresholds(args) -> tuple[GooseThresholds, SvThresholds]:
    return (
        GooseThresholds(args.goose_burst_count, args.goose_burst_window_us, args.goose_gap_us),
        SvThresholds(args.sv_interval_min_us, args.sv_interval_max_us,
                     args.sv_burst_count, args.sv_burst_window_us),
    )


def _thresholds_dict(gthr: GooseThresholds, sthr: SvThresholds) -> dict:
    return {
        "goose_burst_count": gthr.burst_count,
        "goose_burst_window_us": gthr.burst_window_us,
        "goose_gap_us": gthr.gap_us,
        "sv_interval_min_us": sthr.interval_min_us,
        "sv_interval_max_us": sthr.interval_max_us,
        "sv_burst_count": sthr.burst_count,
        "sv_burst_window_us": sthr.burst_window_us,
    }


def _sniff_csv_protocol(path: Path) -> Protocol:
    with open(path, "r", encoding="utf-8", newline="") as f:
        header = f.readline()
    cols = [c.strip().casefold() for c in header.rstrip("\r\n").split(",")]
    if cols == [c.casefold() for c in GOOSE_COLUMNS]:
        return Protocol.GOOSE
    if cols == [c.casefold() for c in SV_COLUMNS]:
        return Protocol.SV
    raise SchemaError(f"header of {path} matches neither the GOOSE nor the SV schema")


def _load_stream(path_text: str, protocol_arg: str) -> tuple[Protocol, list]:
    path = Path(path_text)
    if path.suffix.lower() == ".csv":
        protocol = _sniff_csv_protocol(path)
        if protocol_arg != "auto" and protocol_arg != protocol.value:
            raise SchemaError(f"{path} holds {protocol.value} data, not {protocol_arg}")
        with open(path, "rb") as f:
            return protocol, parse_csv(f, protocol)
    with open(path, "rb") as f:
        records = read_frames(f)
    if not records:
        if protocol_arg == "auto":
            raise SchemaError(f"{path} is empty; pass --protocol to disambiguate")
        return Protocol(protocol_arg), []
    protocol = Protocol.GOOSE if isinstance(records[0], GooseRecord) else Protocol.SV
    if any(isinstance(r, GooseRecord) is not (protocol is Protocol.GOOSE) for r in records):
        raise SchemaError(f"{path} mixes GOOSE and SV frames")
    if protocol_arg != "auto" and protocol_arg != protocol.value:
        raise SchemaError(f"{path} holds {protocol.value} frames, not {protocol_arg}")
    return protocol, [(r, None) for r in records]


def _select_rules(args, protocol: Protocol):
    if args.rules and args.level:
        raise ConfigError("--rules and --level are mutually exclusive")
    overrides = load_level_overrides(args.config) if args.config else None
    if args.rules:
        return parse_rule_list(args.rules, protocol)
    level = TrainingLevel(args.level) if args.level else TrainingLevel.FULL
    return rules_for_level(level, protocol, overrides)


def _run_detection(protocol: Protocol, entries, rules, args):
    gthr, sthr = _thresholds(args)
    if protocol is Protocol.GOOSE:
        return detect_goose_stream(entries, rules, mode=args.mode,
                                   gr8_literal=args.gr8_literal, thresholds=gthr)
    return detect_sv_stream(entries, rules, mode=args.mode, thresholds=sthr)


# ---------------------------------------------------------------------------
# Commands


def cmd_generate(args) -> int:
    protocol = Protocol(args.protocol)
    if args.counts is not None:
        if args.scenario is not None:
            print("mcastids: error: --counts and --scenario are mutually exclusive", file=sys.stderr)
            return EX_USAGE
        try:
            pos_text, neg_text = args.counts.split(",")
            positives, negatives = int(pos_text), int(neg_text)
        except ValueError:
            print(f"mcastids: error: --counts expects P,N, got {args.counts!r}", file=sys.stderr)
            return EX_USAGE
        stream = scale_to_counts(positives, negatives, protocol, args.seed)
    else:
        profile = BenignProfile(
            protocol=protocol,
            duration_s=args.duration,
            start=MicroTimestamp.parse(args.start),
            heartbeat_us=args.heartbeat_us,
            state_change_rate=args.state_change_rate,
            sv_rate=args.sv_rate,
        )
        stream = generate_benign(profile, args.seed)
        if args.scenario is not None:
            scenario = AttackScenario(
                kind=ScenarioKind(args.scenario),
                position=args.position,
                seed=args.seed,
                count=args.count,
                span_us=args.span_us,
                shift_us=args.shift_us,
                target=args.target,
                field=args.field,
            )
            stream = inject(stream, scenario)

    formats = {"csv": ("csv",), "bin": ("bin",), "both": ("csv", "bin")}[args.format]
    if "bin" in formats:
        lossy = any(raw is not None and raw != rec.time.render() for rec, raw in stream.entries())
        if lossy:
            print(
                "mcastids: error: the binary frame format cannot carry malformed "
                "time text; write this stream as CSV",
                file=sys.stderr,
            )
            return EX_USAGE

    outdir = Path(args.output)
    outdir.mkdir(parents=True, exist_ok=True)
    if "csv" in formats:
        with open(outdir / "stream.csv", "w", encoding="utf-8", newline="") as f:
            write_csv(f, protocol, stream.entries())
    if "bin" in formats:
        with open(outdir / "stream.bin", "wb") as f:
            write_frames(f, stream.records)
    with open(outdir / "labels.jsonl", "w", encoding="utf-8") as f:
        write_labels_sidecar(f, stream.truth)

    metadata = dict(stream.metadata)
    metadata["stream_id"] = stream_id(protocol, stream.entries())
    metadata["formats"] = list(formats)
    metadata["thresholds"] = _thresholds_dict(GooseThresholds(), SvThresholds())
    if not args.reproducible:
        metadata["generated_at"] = datetime.now(timezone.utc).isoformat()
    with open(outdir / "metadata.json", "w", encoding="utf-8") as f:
        json.dump(metadata, f, indent=2, sort_keys=True)
        f.write("\n")

    print(f"wrote {len(stream)} {protocol.value} records "
          f"({stream.positive_count} anomalous) to {outdir}")
    return EX_OK


def cmd_detect(args) -> int:
    protocol, entries = _load_stream(args.input, args.protocol)
    rules = _select_rules(args, protocol)
    findings = _run_detection(protocol, entries, rules, args)

    if args.output:
        with open(args.output, "w", encoding="utf-8") as f:
            write_findings(f, findings)
    else:
        write_findings(sys.stdout, findings)

    gthr, sthr = _thresholds(args)
    summary = {
        "records": len(entries),
        "findings": len(findings),
        "per_label": _label_counts(f.labels for f in findings),
        "per_rule": _rule_counts(f.labels for f in findings),
        "rules": sorted(r.value for r in rules),
        "mode": args.mode,
        "thresholds": _thresholds_dict(gthr, sthr),
    }
    print(json.dumps(summary), file=sys.stderr)
    return EX_OK


def _label_counts(label_sets) -> dict[str, int]:
    counts: dict[str, int] = {}
    for labels in label_sets:
        for label in labels:
            counts[label.value] = counts.get(label.value, 0) + 1
    return dict(sorted(counts.items()))


def _rule_counts(label_sets) -> dict[str, int]:
    counts: dict[str, int] = {}
    for labels in label_sets:
        for label in labels:
            key = "/".join(r.value for r in RULES_FOR_LABEL[label])
            counts[key] = counts.get(key, 0) + 1
    return dict(sorted(counts.items()))


def _check_metadata(args, protocol: Protocol, entries) -> None:
    meta_path = Path(args.metadata) if args.metadata else Path(args.labels).parent / "metadata.json"
    if not meta_path.exists():
        if args.metadata:
            raise EvalError(f"metadata file not found: {meta_path}")
        return
    with open(meta_path, "r", encoding="utf-8") as f:
        metadata = json.load(f)
    expected = metadata.get("stream_id")
    if expected is not None and expected != stream_id(protocol, entries):
        raise EvalError(f"stream id mismatch: {meta_path} does not describe this stream")


def cmd_evaluate(args) -> int:
    protocol, entries = _load_stream(args.stream, args.protocol)
    with open(args.labels, "r", encoding="utf-8") as f:
        truth = read_labels_sidecar(f)
    if len(truth) != len(entries):
        raise EvalError(f"sidecar holds {len(truth)} label rows for {len(entries)} records")
    _check_metadata(args, protocol, entries)

    gthr, sthr = _thresholds(args)
    output: dict = {"records": len(entries), "thresholds": _thresholds_dict(gthr, sthr)}

    if args.findings is not None:
        with open(args.findings, "r", encoding="utf-8") as f:
            findings = read_findings(f)
        predicted = findings_to_label_sets(findings, len(entries))
        report = compute_metrics(confusion(truth, predicted))
        print(report.to_table())
        output["metrics"] = report.to_json_dict()
        # supplementary per-label diagnostic; scoring itself is binary
        output["per_label"] = {"truth": _label_counts(truth), "predicted": _label_counts(predicted)}
    elif args.levels is not None:
        overrides = load_level_overrides(args.config) if args.config else None
        try:
            levels = [TrainingLevel(name.strip()) for name in args.levels.split(",") if name.strip()]
        except ValueError as exc:
            raise EvalError(f"bad --levels value: {exc}") from None
        reports = {}
        for level in levels:
            rules = rules_for_level(level, protocol, overrides)
            findings = _run_detection(protocol, entries, rules, args)
            predicted = findings_to_label_sets(findings, len(entries))
            reports[level] = compute_metrics(confusion(truth, predicted))
        deltas = level_comparison(reports)
        output["levels"] = {lvl.value: rep.to_json_dict() for lvl, rep in reports.items()}
        output["accuracy_deltas_pp"] = [round(d, 4) for d in deltas]
        ordered = [lvl for lvl in TrainingLevel if lvl in reports]
        for level in ordered:
            print(f"--- {level.value} ---")
            print(reports[level].to_table())
        steps = [f"{a.value}→{b.value} {d:+.2f}" for a, b, d in zip(ordered, ordered[1:], deltas)]
        print("incremental accuracy (percentage points): " + ", ".join(steps))
    else:
        rules = _select_rules(args, protocol)
        findings = _run_detection(protocol, entries, rules, args)
        predicted = findings_to_label_sets(findings, len(entries))
        report = compute_metrics(confusion(truth, predicted))
        print(report.to_table())
        output["metrics"] = report.to_json_dict()
        output["per_label"] = {"truth": _label_counts(truth), "predicted": _label_counts(predicted)}

    if args.json_out:
        with open(args.json_out, "w", encoding="utf-8") as f:
            json.dump(output, f, indent=2, sort_keys=True)
            f.write("\n")
    return EX_OK


def cmd_rules(args) -> int:
    overrides = load_level_overrides(args.config) if args.config else None
    protocols = [Protocol(args.protocol)] if args.protocol else list(Protocol)
    for protocol in protocols:
        if args.level:
            active = rules_for_level(TrainingLevel(args.level), protocol, overrides)
        else:
            active = frozenset(RuleId)
        for rule in RuleId:
            if rule.protocol is protocol and rule in active:
                print(f"{rule.value}: {describe_rule(rule)}")
    return EX_OK


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else EX_OK
    try:
        return args.func(args)
    except (SchemaError, RowError, OrderError, CodecError) as exc:
        print(f"mcastids: input error: {exc}", file=sys.stderr)
        return EX_INPUT
    except EvalError as exc:
        print(f"mcastids: evaluation error: {exc}", file=sys.stderr)
        return EX_EVAL
    except (ProfileError, InjectError, ConfigError, ValueError) as exc:
        print(f"mcastids: error: {exc}", file=sys.stderr)
        return EX_USAGE
    except OSError as exc:
        print(f"mcastids: i/o error: {exc}", file=sys.stderr)
        return EX_IO


if __name__ == "__main__":
    sys.exit(main())

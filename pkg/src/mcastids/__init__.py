"""Rule-based anomaly detection for IEC 61850 GOOSE and SV multicast traffic.

The toolkit parses feature-log CSVs and a canonical binary frame format,
runs deterministic streaming rule engines over the records, generates
seeded benign/attack traffic with exact ground truth, and scores
detection quality with standard and advanced classification metrics.
"""

from .errors import (
    CodecError,
    ConfigError,
    EncodeError,
    EvalError,
    InjectError,
    McastIdsError,
    OrderError,
    ProfileError,
    RowError,
    SchemaError,
    TlvError,
    TruncationError,
    UnknownKindError,
)
from .goose_rules import GooseDetector, GooseThresholds, detect_goose_stream
from .ingest import (
    FrameKind,
    decode_frame,
    encode_frame,
    frame_kind,
    parse_csv,
    parse_csv_goose,
    parse_csv_sv,
    read_frames,
    render_csv,
    write_csv,
    write_frames,
)
from .metrics import ConfusionMatrix, MetricsReport, compute_metrics, confusion, level_comparison
from .model import (
    GOOSE_ETHERTYPE,
    SMPCNT_MAX,
    SV_ETHERTYPE,
    AnomalyLabel,
    Finding,
    GooseRecord,
    MacAddress,
    MicroTimestamp,
    Protocol,
    SvRecord,
    timestamp_diff_micros,
    validate_time_format,
)
from .rulebook import (
    LABEL_FOR_RULE,
    RULES_FOR_LABEL,
    RuleId,
    RuleSet,
    TrainingLevel,
    describe_rule,
    full_rules,
    load_level_overrides,
    parse_rule_list,
    rules_for_level,
)
from .sv_rules import SvDetector, SvThresholds, detect_sv_stream
from .synth import (
    AttackScenario,
    BenignProfile,
    LabeledStream,
    ScenarioKind,
    generate_benign,
    inject,
    iter_benign_records,
    reference_labels,
    scale_to_counts,
)

__version__ = "0.1.0"

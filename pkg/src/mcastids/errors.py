"""Exception hierarchy shared by every module."""


class McastIdsError(Exception):
    """Base class for all toolkit errors."""


class SchemaError(McastIdsError):
    """CSV header does not match the expected column schema."""


class RowError(McastIdsError):
    """A CSV data row could not be parsed."""

    def __init__(self, message: str, row: int):
        super().__init__(f"row {row}: {message}")
        self.row = row


class CodecError(McastIdsError):
    """Base class for binary frame encode/decode failures."""


class TruncationError(CodecError):
    """Buffer ends before the declared frame length."""


class UnknownKindError(CodecError):
    """EtherType is neither GOOSE (0x88B8) nor SV (0x88BA)."""


class TlvError(CodecError):
    """Frame body is malformed (bad TLV structure or field value)."""


class EncodeError(CodecError):
    """Record cannot be represented in the binary frame format."""


class OrderError(McastIdsError):
    """Timestamps regressed; the stream is not in capture order."""

    def __init__(self, message: str, index: int):
        super().__init__(f"record {index}: {message}")
        self.index = index


class ProfileError(McastIdsError):
    """Benign-traffic profile violates its own invariants."""


class InjectError(McastIdsError):
    """Attack scenario cannot be applied to the given stream."""


class EvalError(McastIdsError):
    """Evaluation inputs are inconsistent (lengths, levels, stream ids)."""


class ConfigError(McastIdsError):
    """Rule-set configuration file is invalid."""

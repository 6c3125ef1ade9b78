"""Exception types shared across the pipeline stages."""


class ChainEconError(Exception):
    """Base class for all chainecon errors."""


class MalformedRecord(ChainEconError):
    """An input record violates the documented schema."""

    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason


class DuplicateTxId(ChainEconError):
    """A transaction id occurs more than once in a dataset."""

    def __init__(self, tx_id: str, line_no: int):
        super().__init__(f"duplicate tx_id {tx_id!r} at line {line_no}")
        self.tx_id = tx_id
        self.line_no = line_no


class NonPositivePrice(ChainEconError):
    """A daily price row carries a zero or negative USD value."""


class MissingPrice(ChainEconError):
    """No usable price for the requested date under the fill policy."""

    def __init__(self, date):
        super().__init__(f"no price available for {date}")
        self.date = date


class UnknownAddress(ChainEconError):
    """Address was never seen during clustering."""


class EntityConsistencyError(ChainEconError):
    """A transaction's inputs map to more than one entity (stale map)."""


class UnlabeledEntity(ChainEconError):
    """A payment references an entity with no monthly category label."""


class EmptyPattern(ChainEconError):
    """Entity received no payments in the requested period."""


class NoShifts(ChainEconError):
    """Shift estimation called with no per-period shifts."""


class NoAnchors(ChainEconError):
    """Calibration called without any usable ground-truth anchor."""


class InvalidConfig(ChainEconError):
    """Synthetic-generator configuration violates its constraints."""

class ReachError(Exception):
    """Base class for every error raised by the reach package."""


class InvalidMdpError(ReachError):
    pass


class SizeMismatchError(ReachError, ValueError):
    pass


class ParameterError(ReachError, ValueError):
    pass


class ResidualCheckError(ReachError):
    """A policy extractor was handed a table that is not the expected fixed point."""


class CapExceededError(ReachError):
    pass


class NotCycledError(ReachError):
    pass


class MdpFormatError(ReachError):
    """Interchange file is malformed or lacks a label the command needs."""


class UsageError(ReachError):
    pass

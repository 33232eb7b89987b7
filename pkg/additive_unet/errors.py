"""Exception types shared by the kit and the exit codes the CLI maps them to."""


class KitError(Exception):
    """Base class for errors the CLI reports as a single line."""

    exit_code = 1
    kind = "error"


class UsageError(KitError):
    """Bad command-line usage."""

    exit_code = 1
    kind = "usage"


class ConfigError(KitError):
    """Invalid run or model configuration."""

    exit_code = 1
    kind = "config"


class DataError(KitError):
    """Missing or unreadable data (images, directories, manifests)."""

    exit_code = 2
    kind = "data"


class ImageFormatError(DataError):
    """Unsupported or truncated image file."""

    kind = "image"


class CheckpointError(DataError):
    """Missing or malformed checkpoint file."""

    kind = "checkpoint"


class OptimizerError(KitError):
    """Optimizer state that does not match the parameters it updates."""

    exit_code = 1
    kind = "optimizer"


class NumericError(KitError):
    """Non-finite values during training or evaluation."""

    exit_code = 3
    kind = "numeric"


class ShapeError(ValueError):
    """Operand shapes do not satisfy an operation's contract."""

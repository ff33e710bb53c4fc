"""
Typed errors for busytime.

Three families map onto CLI exit codes: ConfigError (1), InputDataError (2)
and ModelError (raised when a caller breaks a precondition of the model).
"""


class BusyTimeError(Exception):
    """Root of every error raised by this package."""

    exit_code = 1


# ── configuration ────────────────────────────────────────────────────────────
class ConfigError(BusyTimeError):
    exit_code = 1


class ConfigParseError(ConfigError):
    def __init__(self, key: str, message: str):
        self.key = key
        self.message = message
        super().__init__(f"{key}: {message}")


class UnknownAlgorithm(ConfigError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown algorithm '{name}'")


# ── input data ───────────────────────────────────────────────────────────────
class InputDataError(BusyTimeError):
    exit_code = 2


class ValidationError(InputDataError):
    """A raw record could not become a valid domain object."""


class NonPositiveDuration(ValidationError):
    pass


class NegativeDemand(ValidationError):
    pass


class CoreMipsMismatch(ValidationError):
    pass


class InvalidCoreCount(ValidationError):
    pass


class InvalidPowerModel(ValidationError):
    pass


class UtilizationOutOfRange(ValidationError):
    pass


class MalformedLine(InputDataError):
    def __init__(self, line_no: int, content: str, reason: str = "non-numeric field"):
        self.line_no = line_no
        self.content = content
        super().__init__(f"line {line_no}: {reason}: {content!r}")


class DuplicateJobId(InputDataError):
    def __init__(self, job_id: int):
        self.job_id = job_id
        super().__init__(f"job id {job_id} appears more than once in the trace")


class InconsistentSchedule(InputDataError):
    pass


# ── model preconditions ──────────────────────────────────────────────────────
class ModelError(BusyTimeError):
    exit_code = 1


class ZeroPowerModel(ModelError):
    pass


class ZeroCapacity(ModelError):
    pass


class InfeasibleState(ModelError):
    pass


class HeterogeneousFleet(ModelError):
    pass

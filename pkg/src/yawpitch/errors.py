"""Exception hierarchy shared by all modules."""


class YawPitchError(Exception):
    """Base class for all toolkit errors."""


class InvalidArgumentError(YawPitchError, ValueError):
    pass


class NotFoundError(YawPitchError, LookupError):
    pass


class CalibrationError(YawPitchError):
    """Raised when a model cannot be mapped onto the [0, 100] quality range."""


class MissingCalibrationError(YawPitchError):
    pass


class FormatError(YawPitchError):
    pass


class IncompatibleModelError(YawPitchError):
    pass


class RowError(YawPitchError):
    """One or more data rows failed validation.

    ``problems`` holds ``(line_number, message)`` pairs.
    """

    def __init__(self, path, problems):
        self.path = str(path)
        self.problems = list(problems)
        head = "; ".join(f"line {n}: {msg}" for n, msg in self.problems[:5])
        more = "" if len(self.problems) <= 5 else f" (+{len(self.problems) - 5} more)"
        super().__init__(f"{self.path}: {len(self.problems)} invalid row(s): {head}{more}")

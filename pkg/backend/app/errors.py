"""
Exception hierarchy shared by services and commands.

Each class carries the process exit code the command line reports for it.
"""


class PairCalibError(Exception):
    exit_code = 1


class ParseError(PairCalibError, ValueError):
    """Malformed input file or value"""
    exit_code = 2


class PreconditionError(PairCalibError, ValueError):
    """Input is well formed but does not meet an operation's requirements"""
    exit_code = 3


class DegenerateConfigurationError(PairCalibError, ArithmeticError):
    """Numerically singular or noise-broken geometry"""
    exit_code = 4


class StructureViolationError(DegenerateConfigurationError):
    """Structured zeros of the reduced system are missing"""


class InputOutputError(PairCalibError, OSError):
    exit_code = 5

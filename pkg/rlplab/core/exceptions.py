"""
Custom exception classes for the application
Provides typed exceptions with process exit codes
"""

EXIT_ASSERTION = 1
EXIT_VALIDATION = 2
EXIT_COMPUTATION = 3
EXIT_NOT_FOUND = 4
EXIT_IO = 5


class RLPLabException(Exception):
    """Base exception for rlplab"""

    def __init__(self, message: str, exit_code: int = EXIT_COMPUTATION):
        self.message = message
        self.exit_code = exit_code
        super().__init__(self.message)


class ValidationException(RLPLabException):
    """Raised when input validation fails"""

    def __init__(self, message: str):
        super().__init__(message, EXIT_VALIDATION)


class GridMismatchException(ValidationException):
    """Raised when signals or families live on different grids"""

    def __init__(self, message: str = "Grid size or domain length mismatch"):
        super().__init__(message)


class PreconditionException(ValidationException):
    """Raised when an operation precondition does not hold"""

    def __init__(self, message: str = "Precondition violated"):
        super().__init__(message)


class UnknownExperimentException(RLPLabException):
    """Raised when an experiment name is not registered"""

    def __init__(self, message: str = "Experiment not found"):
        super().__init__(message, EXIT_NOT_FOUND)


class ReportIOException(RLPLabException):
    """Raised when reading or writing a file fails"""

    def __init__(self, message: str = "Report I/O failed"):
        super().__init__(message, EXIT_IO)


class ExperimentAssertionException(RLPLabException):
    """Raised when an experiment-local assertion fails"""

    def __init__(self, message: str = "Experiment assertion failed"):
        super().__init__(message, EXIT_ASSERTION)


class ComputationException(RLPLabException):
    """Raised when a numerical computation fails unexpectedly"""

    def __init__(self, message: str = "Computation failed"):
        super().__init__(message, EXIT_COMPUTATION)


def to_exit_code(exc: BaseException) -> int:
    """Convert any exception to a process exit status"""
    if isinstance(exc, RLPLabException):
        return exc.exit_code
    if isinstance(exc, ValueError):
        # pydantic ValidationError included
        return EXIT_VALIDATION
    return EXIT_COMPUTATION

"""Error types and handling for the mubqkd toolkit."""

from typing import Optional, Any
from enum import Enum


class ErrorCode(str, Enum):
    """Error codes for structured error reporting."""

    # Field errors
    NOT_PRIME = "NOT_PRIME"
    EVEN_CHARACTERISTIC = "EVEN_CHARACTERISTIC"
    INVALID_DEGREE = "INVALID_DEGREE"
    ELEMENT_OUT_OF_RANGE = "ELEMENT_OUT_OF_RANGE"
    NO_INVERSE = "NO_INVERSE"
    FIELD_MISMATCH = "FIELD_MISMATCH"

    # State errors
    INDEX_OUT_OF_RANGE = "INDEX_OUT_OF_RANGE"
    DIMENSION_MISMATCH = "DIMENSION_MISMATCH"
    NON_UNITARY = "NON_UNITARY"
    CORRUPTED_STATE = "CORRUPTED_STATE"

    # Protocol and analysis errors
    INVALID_CONFIG = "INVALID_CONFIG"
    NOT_PRIME_POWER = "NOT_PRIME_POWER"
    DOMAIN_ERROR = "DOMAIN_ERROR"

    # Session errors
    SESSION_NOT_FOUND = "SESSION_NOT_FOUND"
    SESSION_LIMIT_EXCEEDED = "SESSION_LIMIT_EXCEEDED"

    # File errors
    FILE_NOT_FOUND = "FILE_NOT_FOUND"
    FILE_FORMAT_UNSUPPORTED = "FILE_FORMAT_UNSUPPORTED"
    MISSING_DEPENDENCY = "MISSING_DEPENDENCY"

    # General errors
    INVALID_PARAMETER = "INVALID_PARAMETER"
    INTERNAL_ERROR = "INTERNAL_ERROR"


class MubQkdError(Exception):
    """Base exception for the mubqkd toolkit."""

    def __init__(
        self,
        message: str,
        code: ErrorCode = ErrorCode.INTERNAL_ERROR,
        context: Optional[dict[str, Any]] = None,
    ):
        super().__init__(message)
        self.message = message
        self.code = code
        self.context = context or {}

    def to_dict(self) -> dict[str, Any]:
        """Convert error to dictionary for JSON serialization."""
        return {
            "error": self.code.value,
            "message": self.message,
            "context": self.context,
        }

    def describe(self) -> str:
        """One-line form for terminals: ``message [CODE]``."""
        return f"{self.message} [{self.code.value}]"


class FieldError(MubQkdError):
    """Galois field construction and arithmetic errors."""

    pass


class StateError(MubQkdError):
    """State vector, operator and measurement errors."""

    pass


class ProtocolError(MubQkdError):
    """Protocol configuration and simulation errors."""

    pass


class AnalysisError(MubQkdError):
    """Closed-form analysis domain errors."""

    pass


class SessionError(MubQkdError):
    """Session-related errors."""

    pass


class FileError(MubQkdError):
    """File-related errors."""

    pass

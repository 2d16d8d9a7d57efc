"""
Validated configuration for protocol sessions and the MCP server.

Protocol settings can come from keyword arguments, from JSON/YAML files, or
from both (explicit overrides win over file values).
"""

import json
import logging
import os
from datetime import timedelta
from enum import Enum
from typing import Any, Dict, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .errors import ErrorCode, FileError, ProtocolError
from .galois_field import is_prime

logger = logging.getLogger(__name__)

# Automatic worker selection: runs this long go to a process pool
PARALLEL_MIN_ROUNDS = 20_000
MAX_AUTO_WORKERS = 8


class EveStrategy(str, Enum):
    """Eavesdropping strategies applied on every round."""

    NONE = "none"
    INTERCEPT_RESEND = "intercept_resend"
    CONTROLLED_SHIFT = "controlled_shift"


class ProtocolConfig(BaseModel):
    """Parameters of one simulated protocol session."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    p: int = 3
    m: int = Field(1, ge=1)
    control_prob: float = Field(0.5, gt=0.0, lt=1.0)
    eve_strategy: EveStrategy = EveStrategy.NONE
    rounds: int = Field(1000, gt=0)
    seed: int = Field(0, ge=0, lt=2**64)
    # Ancilla / control basis of the controlled-shift attack
    eve_basis: int = Field(1, ge=1)
    # Intercept-resend: draw a fresh basis on the backward path
    independent_backward_basis: bool = False
    # 0 picks a worker count from the run size
    workers: int = Field(0, ge=0)

    @field_validator("eve_strategy", mode="before")
    @classmethod
    def _normalize_strategy(cls, value: Any) -> Any:
        if isinstance(value, str):
            return value.strip().lower().replace("-", "_")
        return value

    @model_validator(mode="after")
    def _check_field(self) -> "ProtocolConfig":
        if not is_prime(self.p) or self.p == 2:
            raise ValueError(f"p must be an odd prime, got {self.p}")
        if self.eve_basis > self.d:
            raise ValueError(f"eve_basis must lie in 1..{self.d}, got {self.eve_basis}")
        return self

    @property
    def d(self) -> int:
        return self.p**self.m

    @property
    def effective_workers(self) -> int:
        """Worker processes actually used by run_session."""
        if self.workers:
            return self.workers
        if self.rounds < PARALLEL_MIN_ROUNDS:
            return 1
        return max(1, min(os.cpu_count() or 1, MAX_AUTO_WORKERS))


class ServerSettings(BaseModel):
    """Limits for the MCP server's session manager."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    max_sessions: int = Field(10, ge=1)
    session_timeout_s: float = Field(3600.0, gt=0)

    @property
    def session_timeout(self) -> timedelta:
        return timedelta(seconds=self.session_timeout_s)


def build_config(**values: Any) -> ProtocolConfig:
    """
    Create a ProtocolConfig, converting validation failures to ProtocolError.

    Keys with value None are dropped so callers can pass optional overrides.
    """
    values = {k: v for k, v in values.items() if v is not None}
    try:
        return ProtocolConfig(**values)
    except ValidationError as e:
        errors = [
            {"field": ".".join(str(loc) for loc in err["loc"]), "message": err["msg"]}
            for err in e.errors()
        ]
        raise ProtocolError(
            f"Invalid protocol configuration: {errors[0]['message'] if errors else e}",
            code=ErrorCode.INVALID_CONFIG,
            context={"errors": errors},
        )


def read_mapping(path: str) -> Dict[str, Any]:
    """Read a JSON or YAML mapping, chosen by file extension."""
    if not os.path.exists(path):
        raise FileError(
            f"Configuration file not found: {path}",
            code=ErrorCode.FILE_NOT_FOUND,
            context={"path": path},
        )

    ext = os.path.splitext(path)[1].lower()
    try:
        if ext == ".json":
            with open(path, "r") as f:
                data = json.load(f)
        elif ext in [".yaml", ".yml"]:
            try:
                import yaml
            except ImportError:
                raise FileError(
                    "YAML support requires 'pyyaml' package",
                    code=ErrorCode.MISSING_DEPENDENCY,
                    context={"path": path},
                )
            try:
                with open(path, "r") as f:
                    data = yaml.safe_load(f)
            except yaml.YAMLError as e:
                raise FileError(
                    f"Invalid YAML: {e}",
                    code=ErrorCode.FILE_FORMAT_UNSUPPORTED,
                    context={"path": path},
                )
        else:
            raise FileError(
                f"Unsupported configuration format: {ext}",
                code=ErrorCode.FILE_FORMAT_UNSUPPORTED,
                context={"path": path},
            )
    except json.JSONDecodeError as e:
        raise FileError(
            f"Invalid JSON: {e}",
            code=ErrorCode.FILE_FORMAT_UNSUPPORTED,
            context={"path": path},
        )

    if not isinstance(data, dict):
        raise FileError(
            "Configuration file must contain a mapping",
            code=ErrorCode.FILE_FORMAT_UNSUPPORTED,
            context={"path": path},
        )
    return data


def load_config(path: Optional[str] = None, **overrides: Any) -> ProtocolConfig:
    """
    Load a ProtocolConfig from a file, then apply non-None overrides.

    Args:
        path: Optional JSON/YAML file
        **overrides: Field values taking precedence over the file

    Returns:
        Validated ProtocolConfig
    """
    values: Dict[str, Any] = read_mapping(path) if path else {}
    values.update({k: v for k, v in overrides.items() if v is not None})
    config = build_config(**values)
    logger.debug("Loaded protocol configuration %s", config.model_dump())
    return config

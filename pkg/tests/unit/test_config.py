"""Unit tests for protocol and server configuration."""

import json
from datetime import timedelta

import pytest
from pydantic import ValidationError

from mubqkd_mcp.config import (
    MAX_AUTO_WORKERS,
    PARALLEL_MIN_ROUNDS,
    EveStrategy,
    ProtocolConfig,
    ServerSettings,
    build_config,
    load_config,
    read_mapping,
)
from mubqkd_mcp.errors import ErrorCode, FileError, ProtocolError


class TestProtocolConfig:
    """Test the pydantic model."""

    def test_defaults(self):
        """Test default values."""
        cfg = ProtocolConfig()
        assert (cfg.p, cfg.m, cfg.d) == (3, 1, 3)
        assert cfg.control_prob == 0.5
        assert cfg.eve_strategy == EveStrategy.NONE
        assert cfg.eve_basis == 1
        assert cfg.workers == 0
        assert cfg.effective_workers == 1

    def test_strategy_normalized(self):
        """Test hyphenated and upper-case strategy names."""
        assert ProtocolConfig(eve_strategy="Controlled-Shift").eve_strategy == EveStrategy.CONTROLLED_SHIFT

    @pytest.mark.parametrize(
        "values",
        [
            {"p": 2},
            {"p": 9},
            {"m": 0},
            {"control_prob": 0.0},
            {"control_prob": 1.0},
            {"rounds": 0},
            {"eve_basis": 4},
            {"eve_basis": 0},
            {"seed": -1},
            {"eve_strategy": "photon_splitting"},
            {"unknown": 1},
        ],
    )
    def test_invalid(self, values):
        """Test rejected values."""
        with pytest.raises(ValidationError):
            ProtocolConfig(**values)

    def test_eve_basis_scales_with_field(self):
        """Test eve_basis may reach d for larger fields."""
        assert ProtocolConfig(p=3, m=2, eve_basis=9).eve_basis == 9

    def test_effective_workers(self):
        """Test automatic worker selection follows the run size."""
        assert ProtocolConfig(rounds=PARALLEL_MIN_ROUNDS - 1).effective_workers == 1
        assert 1 <= ProtocolConfig(rounds=PARALLEL_MIN_ROUNDS).effective_workers <= MAX_AUTO_WORKERS
        assert ProtocolConfig(rounds=10, workers=3).effective_workers == 3
        assert ProtocolConfig(rounds=PARALLEL_MIN_ROUNDS, workers=1).effective_workers == 1

    def test_frozen(self):
        """Test configs are immutable."""
        cfg = ProtocolConfig()
        with pytest.raises(ValidationError):
            cfg.rounds = 5


class TestBuildConfig:
    """Test error conversion and file loading."""

    def test_structured_error(self):
        """Test validation errors become ProtocolError."""
        with pytest.raises(ProtocolError) as exc_info:
            build_config(p=4)
        assert exc_info.value.code == ErrorCode.INVALID_CONFIG
        assert exc_info.value.context["errors"]

    def test_none_dropped(self):
        """Test None overrides keep defaults."""
        assert build_config(p=None, rounds=7).rounds == 7

    def test_json_file_with_override(self, tmp_path):
        """Test file values and overrides."""
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"p": 5, "rounds": 50, "eve_strategy": "intercept_resend"}))
        cfg = load_config(str(path), rounds=10)
        assert cfg.p == 5
        assert cfg.rounds == 10
        assert cfg.eve_strategy == EveStrategy.INTERCEPT_RESEND

    def test_yaml_file(self, tmp_path):
        """Test YAML configuration."""
        pytest.importorskip("yaml")
        path = tmp_path / "cfg.yaml"
        path.write_text("p: 7\ncontrol_prob: 0.25\n")
        cfg = load_config(str(path))
        assert (cfg.p, cfg.control_prob) == (7, 0.25)

    def test_missing_file(self):
        """Test nonexistent files."""
        with pytest.raises(FileError) as exc_info:
            read_mapping("/nonexistent/cfg.json")
        assert exc_info.value.code == ErrorCode.FILE_NOT_FOUND

    def test_unsupported_extension(self, tmp_path):
        """Test unknown extensions."""
        path = tmp_path / "cfg.toml"
        path.write_text("p = 3")
        with pytest.raises(FileError) as exc_info:
            read_mapping(str(path))
        assert exc_info.value.code == ErrorCode.FILE_FORMAT_UNSUPPORTED

    def test_non_mapping(self, tmp_path):
        """Test a JSON list is rejected."""
        path = tmp_path / "cfg.json"
        path.write_text("[1, 2]")
        with pytest.raises(FileError):
            read_mapping(str(path))

    def test_invalid_json(self, tmp_path):
        """Test malformed JSON."""
        path = tmp_path / "cfg.json"
        path.write_text("{p: 3")
        with pytest.raises(FileError) as exc_info:
            read_mapping(str(path))
        assert exc_info.value.code == ErrorCode.FILE_FORMAT_UNSUPPORTED

    def test_invalid_yaml(self, tmp_path):
        """Test malformed YAML becomes a structured error."""
        pytest.importorskip("yaml")
        path = tmp_path / "cfg.yaml"
        path.write_text("p: [3\n")
        with pytest.raises(FileError) as exc_info:
            read_mapping(str(path))
        assert exc_info.value.code == ErrorCode.FILE_FORMAT_UNSUPPORTED
        assert exc_info.value.context["path"] == str(path)


class TestServerSettings:
    """Test server settings."""

    def test_defaults(self):
        """Test default limits."""
        settings = ServerSettings()
        assert settings.max_sessions == 10
        assert settings.session_timeout == timedelta(hours=1)

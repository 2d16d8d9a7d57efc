"""Unit tests for export tools."""

import json

import pytest

from mubqkd_mcp.errors import ErrorCode, FileError
from mubqkd_mcp.tools_export import (
    export_rows,
    format_number,
    render,
    rows_to_csv,
    write_ndjson,
    write_text,
)


class TestFormatting:
    """Test cell and document rendering."""

    def test_format_number(self):
        """Test 12 significant digits and literal cells."""
        assert format_number(4 / 9) == "0.444444444444"
        assert format_number(1.0) == "1"
        assert format_number(3) == "3"
        assert format_number(True) == "true"
        assert format_number(None) == ""

    def test_csv_bytes(self):
        """Test header, column order and line endings."""
        text = rows_to_csv([{"d": 3, "p": 4 / 9}, {"d": 5, "p": 0.64}], ["d", "p"])
        assert text == "d,p\n3,0.444444444444\n5,0.64\n"

    def test_csv_repeatable(self):
        """Test identical rows give identical text."""
        rows = [{"d": d, "p": (d - 1) ** 2 / d**2} for d in (3, 5, 7)]
        assert rows_to_csv(rows) == rows_to_csv(rows)

    def test_render_json(self):
        """Test JSON output."""
        assert json.loads(render([{"d": 3}], "json")) == [{"d": 3}]

    def test_render_mapping_as_csv(self):
        """Test a single mapping is one CSV row."""
        assert render({"a": 1, "b": 0.5}, "csv") == "a,b\n1,0.5\n"

    def test_render_yaml(self):
        """Test YAML output."""
        yaml = pytest.importorskip("yaml")
        assert yaml.safe_load(render({"d": 3}, "yaml")) == {"d": 3}

    def test_unsupported_format(self):
        """Test unknown formats."""
        with pytest.raises(FileError) as exc_info:
            render([], "xml")
        assert exc_info.value.code == ErrorCode.FILE_FORMAT_UNSUPPORTED


class TestWriting:
    """Test file output."""

    def test_write_text(self, tmp_path):
        """Test text is written verbatim."""
        path = tmp_path / "out.csv"
        write_text("a\n1\n", str(path))
        assert path.read_bytes() == b"a\n1\n"

    def test_missing_directory(self, tmp_path):
        """Test output into a missing directory."""
        with pytest.raises(FileError) as exc_info:
            write_text("x", str(tmp_path / "missing" / "out.csv"))
        assert exc_info.value.code == ErrorCode.FILE_NOT_FOUND

    def test_ndjson(self, tmp_path):
        """Test one compact JSON object per line."""
        path = tmp_path / "rows.ndjson"
        assert write_ndjson([{"a": 1}, {"a": 2}], str(path)) == 2
        assert path.read_text() == '{"a":1}\n{"a":2}\n'

    @pytest.mark.asyncio
    async def test_export_rows(self, tmp_path):
        """Test the async export tool."""
        path = tmp_path / "fig2.csv"
        result = await export_rows([{"d": 3, "p": 0.5}], str(path), "csv", ["d", "p"])
        assert result["rows_written"] == 1
        assert result["format"] == "csv"
        assert path.read_text() == "d,p\n3,0.5\n"

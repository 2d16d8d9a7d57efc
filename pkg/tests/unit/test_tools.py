"""Unit tests for the async MCP tool functions."""

import csv

import pytest

from mubqkd_mcp.errors import AnalysisError, ErrorCode, FieldError, SessionError
from mubqkd_mcp.session import SessionManager
from mubqkd_mcp.tools_analysis import (
    analysis_fig2,
    analysis_fig3,
    analysis_qdc_monte_carlo,
    security_closed_form,
)
from mubqkd_mcp.tools_field import (
    field_mub_check,
    field_table,
    field_table_rows,
    mub_vector,
    operation_matrix,
)
from mubqkd_mcp.tools_protocol import protocol_compare, protocol_simulate
from mubqkd_mcp.tools_session import SessionTools


@pytest.fixture
def session_manager():
    return SessionManager(max_sessions=2)


@pytest.fixture
def session_tools(session_manager):
    return SessionTools(session_manager)


class TestSessionTools:
    """Tests for session_* tools."""

    @pytest.mark.asyncio
    async def test_open_info_close(self, session_tools):
        """Test the session lifecycle."""
        opened = await session_tools.session_open(p=3, m=2)
        assert opened["d"] == 9
        assert opened["irreducible"] == "x^2 + 1"
        assert opened["num_bases"] == 10

        info = await session_tools.session_info(opened["session_id"])
        assert info["field"] == "GF(3^2)"
        assert info["irreducible_coefficients"] == [1, 0, 1]

        listed = await session_tools.session_list()
        assert listed["count"] == 1

        closed = await session_tools.session_close(opened["session_id"])
        assert closed["success"] is True

    @pytest.mark.asyncio
    async def test_close_unknown(self, session_tools):
        """Test closing an unknown session."""
        with pytest.raises(SessionError) as exc_info:
            await session_tools.session_close("nope")
        assert exc_info.value.code == ErrorCode.SESSION_NOT_FOUND


class TestFieldTools:
    """Tests for field_table, mub_check and mub_vector."""

    def test_rows(self, gf9):
        """Test every table kind."""
        assert len(field_table_rows(gf9, "add")) == 81
        assert field_table_rows(gf9, "elements")[4] == {"index": 4, "digits": "1 1", "polynomial": "x + 1"}
        assert field_table_rows(gf9, "neg")[1] == {"a": 1, "result": 2}
        with pytest.raises(FieldError):
            field_table_rows(gf9, "div")

    def test_operation_matrix(self, gf9):
        """Test the d x d multiplication table and its headers."""
        columns, rows = operation_matrix(gf9, "mul")
        assert columns == ["*"] + [str(b) for b in range(9)]
        assert [row["*"] for row in rows] == list(range(9))
        # x * x = -1 under x^2 + 1
        assert rows[3]["3"] == 2
        with pytest.raises(FieldError):
            operation_matrix(gf9, "neg")

    @pytest.mark.asyncio
    async def test_field_table_matrix(self):
        """Test the add tool result carries the matrix."""
        result = await field_table(None, p=3, kind="add")
        assert result["matrix"] == [[0, 1, 2], [1, 2, 0], [2, 0, 1]]

    @pytest.mark.asyncio
    async def test_field_table_from_session(self, session_manager):
        """Test tables read from an open session."""
        session = session_manager.create_session(3)
        result = await field_table(session_manager, session_id=session.session_id, kind="mul")
        assert result["d"] == 3
        assert {"a": 2, "b": 2, "result": 1} in result["rows"]

    @pytest.mark.asyncio
    async def test_field_table_needs_field(self):
        """Test missing p and session_id."""
        with pytest.raises(FieldError) as exc_info:
            await field_table(None)
        assert exc_info.value.code == ErrorCode.INVALID_PARAMETER

    @pytest.mark.asyncio
    async def test_mub_check(self):
        """Test certification through the tool."""
        result = await field_mub_check(None, p=5, m=1)
        assert result["passed"] is True

    @pytest.mark.asyncio
    async def test_mub_vector(self):
        """Test amplitudes of the computational basis."""
        result = await mub_vector(None, k=0, t=1, p=3)
        assert result["real"] == [0.0, 1.0, 0.0]
        assert result["imag"] == [0.0, 0.0, 0.0]


class TestProtocolTools:
    """Tests for protocol_simulate and protocol_compare."""

    @pytest.mark.asyncio
    async def test_simulate(self, session_manager, tmp_path):
        """Test a session-backed simulation records its run."""
        session = session_manager.create_session(3)
        records = tmp_path / "records.ndjson"
        result = await protocol_simulate(
            session_manager,
            session_id=session.session_id,
            rounds=50,
            eve_strategy="controlled_shift",
            records_path=str(records),
        )
        assert result["config"]["p"] == 3
        assert result["stats"]["total_rounds"] == 50
        assert len(records.read_text().splitlines()) == 50
        assert session.runs[0]["tool"] == "protocol_simulate"

    @pytest.mark.asyncio
    async def test_session_context_is_used(self, session_manager, monkeypatch):
        """Test session-backed runs reuse the session's operators."""
        session = session_manager.create_session(5)

        def no_rebuild(p, m):
            raise AssertionError(f"context for GF({p}^{m}) rebuilt")

        monkeypatch.setattr("mubqkd_mcp.protocol_sim.load_context", no_rebuild)
        simulated = await protocol_simulate(session_manager, session_id=session.session_id, rounds=30)
        compared = await protocol_compare(session_manager, session_id=session.session_id, rounds=30)
        assert simulated["stats"]["total_rounds"] == 30
        assert compared["d"] == 5
        assert [run["tool"] for run in session.runs] == ["protocol_simulate", "protocol_compare"]

    @pytest.mark.asyncio
    async def test_compare(self):
        """Test the compare tool without a session."""
        result = await protocol_compare(None, p=3, rounds=100, seed=4)
        assert result["passed"] is True
        assert "no adversary" in result["notes"]


class TestAnalysisTools:
    """Tests for closed forms and figure tables."""

    @pytest.mark.asyncio
    async def test_closed_form(self):
        """Test P_E, I_E and QDC at one information target."""
        result = await security_closed_form(3, c=0.5, information_bits=1.584962500721156)
        assert result["detection_probability"] == pytest.approx(4 / 9)
        assert result["qdc_success"] == pytest.approx(9 / 13)

    @pytest.mark.asyncio
    async def test_closed_form_rejects(self):
        """Test non-prime-power dimensions."""
        with pytest.raises(AnalysisError):
            await security_closed_form(15)

    @pytest.mark.asyncio
    async def test_fig2_to_file(self, tmp_path):
        """Test CSV output of the detection table."""
        path = tmp_path / "fig2.csv"
        result = await analysis_fig2([3, 5, 7], output_path=str(path))
        assert result["rows_written"] == 3
        with open(path) as f:
            rows = list(csv.DictReader(f))
        assert rows[0] == {"d": "3", "detection_probability": "0.444444444444"}

    @pytest.mark.asyncio
    async def test_fig3_inline(self):
        """Test inline rows and the best dimension."""
        result = await analysis_fig3(d_list=[3, 5], max_bits=4, step=2)
        assert result["count"] == 6
        assert result["best_d_at_max_bits"] == 3

    @pytest.mark.asyncio
    async def test_qdc_monte_carlo(self):
        """Test the Monte Carlo tool derives P_E from d."""
        result = await analysis_qdc_monte_carlo(d=3, n_messages=1, trials=2000)
        assert result["p_e"] == pytest.approx(4 / 9)
        assert 0.0 <= result["empirical"] <= 1.0

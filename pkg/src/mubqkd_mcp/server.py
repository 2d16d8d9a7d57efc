"""MCP server exposing the MUB toolkit."""

import asyncio
import json
import logging
import sys
from typing import Any, Optional

from mcp.server import Server
from mcp.server.stdio import stdio_server
from mcp.types import TextContent, Tool

from .config import ServerSettings
from .errors import MubQkdError
from .session import SessionManager
from .tools_analysis import (
    analysis_fig2,
    analysis_fig3,
    analysis_qdc_monte_carlo,
    security_closed_form,
)
from .tools_field import field_mub_check, field_table, mub_vector
from .tools_protocol import protocol_compare, protocol_simulate
from .tools_session import SessionTools

logger = logging.getLogger(__name__)

_SESSION_ID = {"type": "string", "description": "Session identifier from session_open"}
_P = {"type": "integer", "description": "Odd prime characteristic"}
_M = {"type": "integer", "description": "Extension degree (default: 1)", "default": 1}
_FORMAT = {
    "type": "string",
    "enum": ["csv", "json", "yaml"],
    "description": "Output format when output_path is given (default: csv)",
    "default": "csv",
}
_D_LIST = {
    "type": "array",
    "items": {"type": "integer"},
    "description": "Odd prime powers (default: all up to 49)",
}

_RUN_PROPERTIES = {
    "session_id": _SESSION_ID,
    "p": _P,
    "m": _M,
    "rounds": {"type": "integer", "description": "Number of rounds (default: 1000)"},
    "control_prob": {"type": "number", "description": "Control-mode probability c in (0, 1) (default: 0.5)"},
    "eve_strategy": {
        "type": "string",
        "enum": ["none", "intercept_resend", "controlled_shift"],
        "description": "Eavesdropper applied on every round (default: none)",
    },
    "eve_basis": {"type": "integer", "description": "Ancilla basis of the controlled-shift attack (default: 1)"},
    "independent_backward_basis": {
        "type": "boolean",
        "description": "Intercept-resend uses a fresh basis on the backward path",
    },
    "seed": {"type": "integer", "description": "Root seed (default: 0)"},
    "workers": {"type": "integer", "description": "Worker processes; 0 (default) uses a pool for runs of 20000 rounds or more"},
    "config_path": {"type": "string", "description": "JSON/YAML configuration file"},
}


def _tool(name: str, description: str, properties: dict, required: Optional[list] = None) -> Tool:
    return Tool(
        name=name,
        description=description,
        inputSchema={"type": "object", "properties": properties, "required": required or []},
    )


TOOLS = [
    _tool(
        "session_open",
        "Build GF(p^m) and its d+1 mutually unbiased bases, and open a session on them. "
        "Returns session_id for subsequent operations.",
        {"p": _P, "m": _M},
        ["p"],
    ),
    _tool("session_info", "Field metadata, MUB deviation and run history of a session.",
          {"session_id": _SESSION_ID}, ["session_id"]),
    _tool("session_close", "Close a session. Sessions also auto-expire after inactivity.",
          {"session_id": _SESSION_ID}, ["session_id"]),
    _tool("session_list", "List open sessions.", {}),
    _tool(
        "field_table",
        "Arithmetic tables of GF(p^m): elements, add, mul or neg.",
        {
            "session_id": _SESSION_ID,
            "p": _P,
            "m": _M,
            "kind": {"type": "string", "enum": ["elements", "add", "mul", "neg"], "default": "add"},
        },
    ),
    _tool(
        "mub_check",
        "Certify the d+1 bases as mutually unbiased; reports the largest deviation.",
        {
            "session_id": _SESSION_ID,
            "p": _P,
            "m": _M,
            "threshold": {"type": "number", "description": "Pass threshold (default: 1e-9)"},
        },
    ),
    _tool(
        "mub_vector",
        "Amplitudes of basis vector t of basis k (k=0 is computational).",
        {"session_id": _SESSION_ID, "p": _P, "m": _M, "k": {"type": "integer"}, "t": {"type": "integer"}},
        ["k", "t"],
    ),
    _tool(
        "protocol_simulate",
        "Run a protocol session round by round and return detection rate, "
        "decode accuracy and Eve's information estimates.",
        dict(_RUN_PROPERTIES, records_path={"type": "string", "description": "NDJSON file for round records"}),
    ),
    _tool(
        "protocol_compare",
        "Simulate a session and check it against the closed-form detection probability "
        "and Eve's expected accuracy with a 3-sigma gate.",
        _RUN_PROPERTIES,
    ),
    _tool(
        "security_closed_form",
        "Closed-form detection probability, Eve's information per run and QDC success.",
        {
            "d": {"type": "integer", "description": "Odd prime power"},
            "c": {"type": "number", "description": "Control-mode probability (default: 0.5)"},
            "information_bits": {"type": "number", "description": "Target information I in bits"},
        },
        ["d"],
    ),
    _tool(
        "analysis_fig2",
        "Detection probability against dimension.",
        {"d_list": _D_LIST, "output_path": {"type": "string"}, "format": _FORMAT},
    ),
    _tool(
        "analysis_fig3",
        "QDC success probability against information, one curve per dimension.",
        {
            "c": {"type": "number", "default": 0.5},
            "d_list": _D_LIST,
            "max_bits": {"type": "number", "default": 20},
            "step": {"type": "number", "default": 1},
            "output_path": {"type": "string"},
            "format": _FORMAT,
        },
    ),
    _tool(
        "analysis_qdc_monte_carlo",
        "Event-level simulation of attack-until-detected against the closed-form QDC success.",
        {
            "c": {"type": "number", "default": 0.5},
            "d": {"type": "integer"},
            "p_e": {"type": "number"},
            "n_messages": {"type": "integer", "default": 1},
            "trials": {"type": "integer", "default": 100000},
            "seed": {"type": "integer", "default": 0},
        },
    ),
]


class MubQkdMCPServer:
    """MCP server for MUB construction and two-way QKD security analysis."""

    def __init__(self, settings: Optional[ServerSettings] = None):
        self.settings = settings or ServerSettings()
        self.app = Server("mubqkd-mcp")
        self.session_manager = SessionManager(
            max_sessions=self.settings.max_sessions,
            session_timeout=self.settings.session_timeout,
        )
        self.session_tools = SessionTools(self.session_manager)

        self._register_handlers()

    async def dispatch(self, name: str, arguments: dict[str, Any]) -> Any:
        """Route a tool call; raises ValueError for unknown tools."""
        sm = self.session_manager
        if name == "session_open":
            return await self.session_tools.session_open(**arguments)
        elif name == "session_info":
            return await self.session_tools.session_info(**arguments)
        elif name == "session_close":
            return await self.session_tools.session_close(**arguments)
        elif name == "session_list":
            return await self.session_tools.session_list()
        elif name == "field_table":
            return await field_table(sm, **arguments)
        elif name == "mub_check":
            return await field_mub_check(sm, **arguments)
        elif name == "mub_vector":
            return await mub_vector(sm, **arguments)
        elif name == "protocol_simulate":
            return await protocol_simulate(sm, **arguments)
        elif name == "protocol_compare":
            return await protocol_compare(sm, **arguments)
        elif name == "security_closed_form":
            return await security_closed_form(**arguments)
        elif name == "analysis_fig2":
            return await analysis_fig2(**arguments)
        elif name == "analysis_fig3":
            return await analysis_fig3(**arguments)
        elif name == "analysis_qdc_monte_carlo":
            return await analysis_qdc_monte_carlo(**arguments)
        raise ValueError(f"Unknown tool: {name}")

    async def handle_call(self, name: str, arguments: Optional[dict[str, Any]]) -> list[TextContent]:
        """Run a tool and wrap its result (or error) as JSON text."""
        try:
            result = await self.dispatch(name, arguments or {})
            return [TextContent(type="text", text=json.dumps(result, indent=2, default=str))]

        except MubQkdError as e:
            logger.warning("Tool %s failed: %s (%s)", name, e.message, e.code.value)
            return [TextContent(type="text", text=json.dumps(e.to_dict(), indent=2, default=str))]

        except Exception as e:
            logger.exception("Unexpected error in tool %s", name)
            error_response = {
                "error": "INTERNAL_ERROR",
                "message": str(e),
                "type": type(e).__name__,
            }
            return [TextContent(type="text", text=json.dumps(error_response, indent=2))]

    def _register_handlers(self) -> None:
        """Register MCP protocol handlers."""

        @self.app.list_tools()
        async def list_tools() -> list[Tool]:
            return TOOLS

        @self.app.call_tool()
        async def call_tool(name: str, arguments: Any) -> list[TextContent]:
            return await self.handle_call(name, arguments)

    async def run(self) -> None:
        """Run the MCP server."""
        async with stdio_server() as (read_stream, write_stream):
            await self.app.run(read_stream, write_stream, self.app.create_initialization_options())


def main() -> None:
    """Main entry point for the server."""
    # stdout carries the MCP protocol
    logging.basicConfig(
        level=logging.INFO,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    server = MubQkdMCPServer()
    asyncio.run(server.run())


if __name__ == "__main__":
    main()

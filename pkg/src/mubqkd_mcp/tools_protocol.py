"""Protocol tools - simulate sessions and compare them with theory."""

import asyncio
import logging
from typing import Any, Dict, Optional, Tuple

from .analysis import compare
from .config import ProtocolConfig, load_config
from .protocol_sim import ProtocolContext, run_session
from .session import SessionManager

logger = logging.getLogger(__name__)


def _config_for(
    session_manager: Optional[SessionManager],
    session_id: Optional[str],
    config_path: Optional[str],
    **overrides: Any,
) -> Tuple[ProtocolConfig, Optional[ProtocolContext]]:
    """Effective configuration plus the session's prebuilt context, if any."""
    context = None
    if session_id is not None and session_manager is not None:
        session = session_manager.require_session(session_id)
        overrides["p"], overrides["m"] = session.spec.p, session.spec.m
        context = session.context
    return load_config(config_path, **overrides), context


def _remember(session_manager: Optional[SessionManager], session_id: Optional[str], entry: Dict[str, Any]) -> None:
    if session_id is not None and session_manager is not None:
        session = session_manager.get_session(session_id)
        if session:
            session.record_run(entry)


async def protocol_simulate(
    session_manager: Optional[SessionManager],
    session_id: Optional[str] = None,
    p: Optional[int] = None,
    m: Optional[int] = None,
    rounds: Optional[int] = None,
    control_prob: Optional[float] = None,
    eve_strategy: Optional[str] = None,
    eve_basis: Optional[int] = None,
    independent_backward_basis: Optional[bool] = None,
    seed: Optional[int] = None,
    workers: Optional[int] = None,
    records_path: Optional[str] = None,
    config_path: Optional[str] = None,
) -> Dict[str, Any]:
    """
    Run a protocol session and return its aggregate statistics.

    Args:
        session_manager: Session manager instance
        session_id: Session whose field is used (overrides p and m)
        p, m: Field parameters when no session is given
        rounds: Number of rounds
        control_prob: Control-mode probability c
        eve_strategy: "none", "intercept_resend" or "controlled_shift"
        eve_basis: Ancilla basis of the controlled-shift attack
        independent_backward_basis: Intercept-resend measures the backward path in a fresh basis
        seed: Root seed
        workers: Worker processes
        records_path: Optional NDJSON file for every round record
        config_path: Optional JSON/YAML configuration file

    Returns:
        Dictionary with the effective configuration and session statistics
    """
    cfg, context = _config_for(
        session_manager, session_id, config_path,
        p=p, m=m, rounds=rounds, control_prob=control_prob, eve_strategy=eve_strategy,
        eve_basis=eve_basis, independent_backward_basis=independent_backward_basis,
        seed=seed, workers=workers,
    )
    result = await asyncio.to_thread(run_session, cfg, records_path, context)
    stats = result.stats.to_dict()
    _remember(session_manager, session_id, {"tool": "protocol_simulate", "config": cfg.model_dump(mode="json"),
                                            "detection_rate": stats["detection_rate"]})
    response: Dict[str, Any] = {"config": cfg.model_dump(mode="json"), "stats": stats}
    if records_path:
        response["records_file"] = records_path
    return response


async def protocol_compare(
    session_manager: Optional[SessionManager],
    session_id: Optional[str] = None,
    p: Optional[int] = None,
    m: Optional[int] = None,
    rounds: Optional[int] = None,
    control_prob: Optional[float] = None,
    eve_strategy: Optional[str] = None,
    eve_basis: Optional[int] = None,
    independent_backward_basis: Optional[bool] = None,
    seed: Optional[int] = None,
    workers: Optional[int] = None,
    config_path: Optional[str] = None,
) -> Dict[str, Any]:
    """
    Simulate a session and check detection rate and Eve's accuracy against
    the closed forms with a 3-sigma gate.
    """
    cfg, context = _config_for(
        session_manager, session_id, config_path,
        p=p, m=m, rounds=rounds, control_prob=control_prob, eve_strategy=eve_strategy,
        eve_basis=eve_basis, independent_backward_basis=independent_backward_basis,
        seed=seed, workers=workers,
    )
    report = await asyncio.to_thread(compare, cfg, None, context)
    result = report.to_dict()
    _remember(session_manager, session_id, {"tool": "protocol_compare", "config": cfg.model_dump(mode="json"),
                                            "passed": result["passed"]})
    return result

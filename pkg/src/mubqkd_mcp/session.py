"""
Sessions over prebuilt fields.

Building GF(p^m), its d+1 bases and Alice's d+1 operators is the expensive
part of every tool call, so a session keeps them warm. Sessions opened on the
same (p, m) share one build; the build is dropped with the last session that
uses it.
"""

import logging
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timedelta
from typing import Any, Dict, List, Optional, Tuple

from .errors import ErrorCode, SessionError
from .galois_field import FieldSpec, make_field
from .mub_builder import MubTable, build_mub, mub_deviation
from .protocol_sim import ProtocolContext, build_context

logger = logging.getLogger(__name__)

# Runs remembered per session; older entries are dropped first
MAX_RUN_HISTORY = 50


@dataclass(frozen=True)
class FieldBuild:
    """Everything derived from (p, m) that a round needs."""

    spec: FieldSpec
    table: MubTable
    context: ProtocolContext
    deviation: float

    @classmethod
    def create(cls, p: int, m: int) -> "FieldBuild":
        spec = make_field(p, m)
        table = build_mub(spec)
        return cls(spec, table, build_context(table), mub_deviation(table))


@dataclass
class ProtocolSession:
    session_id: str
    build: FieldBuild
    created_at: datetime
    last_accessed: datetime
    runs: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def spec(self) -> FieldSpec:
        return self.build.spec

    @property
    def table(self) -> MubTable:
        return self.build.table

    @property
    def context(self) -> ProtocolContext:
        return self.build.context

    @property
    def mub_deviation(self) -> float:
        return self.build.deviation

    @property
    def d(self) -> int:
        return self.build.spec.d

    def touch(self) -> None:
        self.last_accessed = datetime.now()

    def idle_for(self) -> timedelta:
        return datetime.now() - self.last_accessed

    def is_expired(self, timeout: timedelta) -> bool:
        return self.idle_for() > timeout

    def record_run(self, entry: Dict[str, Any]) -> None:
        """Append a tool run to the history, keeping the newest MAX_RUN_HISTORY."""
        self.runs.append(entry)
        del self.runs[:-MAX_RUN_HISTORY]


class SessionManager:
    """
    Owns open sessions and the field builds behind them.

    Args:
        max_sessions: Open sessions allowed at once; expired sessions are
            evicted before the limit is enforced
        session_timeout: Inactivity after which a session may be evicted
    """

    def __init__(self, max_sessions: int = 10, session_timeout: timedelta = timedelta(hours=1)):
        self.max_sessions = max_sessions
        self.session_timeout = session_timeout
        self._sessions: Dict[str, ProtocolSession] = {}
        self._builds: Dict[Tuple[int, int], FieldBuild] = {}

    def create_session(self, p: int, m: int = 1) -> ProtocolSession:
        """
        Open a session on GF(p^m), reusing the build of any open session on
        the same field.

        Raises:
            SessionError: SESSION_LIMIT_EXCEEDED when no expired session can be evicted
            FieldError: If (p, m) does not describe an odd-characteristic field
        """
        if len(self._sessions) >= self.max_sessions and not self.evict_expired():
            raise SessionError(
                f"All {self.max_sessions} sessions are in use; close one with session_close",
                code=ErrorCode.SESSION_LIMIT_EXCEEDED,
                context={"max_sessions": self.max_sessions, "open": len(self._sessions)},
            )

        key = (p, m)
        build = self._builds.get(key)
        if build is None:
            build = FieldBuild.create(p, m)
            self._builds[key] = build
            logger.debug("Built %s (MUB deviation %.3e)", build.spec, build.deviation)

        now = datetime.now()
        session = ProtocolSession(str(uuid.uuid4()), build, created_at=now, last_accessed=now)
        self._sessions[session.session_id] = session
        logger.info("Opened session %s on %s", session.session_id, build.spec)
        return session

    def get_session(self, session_id: str) -> Optional[ProtocolSession]:
        session = self._sessions.get(session_id)
        if session is not None:
            session.touch()
        return session

    def require_session(self, session_id: str) -> ProtocolSession:
        session = self.get_session(session_id)
        if session is None:
            raise SessionError(
                f"Session not found: {session_id}",
                code=ErrorCode.SESSION_NOT_FOUND,
                context={"session_id": session_id, "open": self.list_sessions()},
            )
        return session

    def close_session(self, session_id: str) -> bool:
        """Close a session; False if the ID is unknown."""
        session = self._sessions.pop(session_id, None)
        if session is None:
            return False
        self._release(session.spec)
        logger.info("Closed session %s", session_id)
        return True

    def list_sessions(self) -> List[str]:
        return list(self._sessions)

    def get_session_count(self) -> int:
        return len(self._sessions)

    def cached_fields(self) -> List[Tuple[int, int]]:
        """(p, m) pairs currently built."""
        return sorted(self._builds)

    def evict_expired(self) -> List[str]:
        """Close every session idle longer than the timeout; returns their IDs."""
        expired = [sid for sid, s in self._sessions.items() if s.is_expired(self.session_timeout)]
        for sid in expired:
            self.close_session(sid)
        if expired:
            logger.info("Evicted %d idle session(s)", len(expired))
        return expired

    def cleanup_all(self) -> int:
        count = len(self._sessions)
        self._sessions.clear()
        self._builds.clear()
        return count

    def _release(self, spec: FieldSpec) -> None:
        if not any(s.spec == spec for s in self._sessions.values()):
            self._builds.pop((spec.p, spec.m), None)

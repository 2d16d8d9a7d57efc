"""Session tools - open, inspect, close and list prebuilt fields."""

from typing import Any, Dict

from .errors import ErrorCode, SessionError
from .galois_field import format_polynomial
from .session import SessionManager


class SessionTools:
    """Tools for protocol session management."""

    def __init__(self, session_manager: SessionManager):
        self.session_manager = session_manager

    async def session_open(self, p: int, m: int = 1) -> Dict[str, Any]:
        """
        Build GF(p^m) with its d+1 bases and open a session on it.

        Args:
            p: Odd prime characteristic
            m: Extension degree (default: 1)

        Returns:
            Dictionary with session_id and field metadata
        """
        session = self.session_manager.create_session(p=p, m=m)
        return {
            "session_id": session.session_id,
            "field": str(session.spec),
            "p": session.spec.p,
            "m": session.spec.m,
            "d": session.d,
            "irreducible": format_polynomial(session.spec.irreducible),
            "num_bases": session.d + 1,
            "mub_deviation": session.mub_deviation,
        }

    async def session_info(self, session_id: str) -> Dict[str, Any]:
        """
        Get metadata and run history for a session.

        Args:
            session_id: Session identifier from session_open
        """
        session = self.session_manager.require_session(session_id)
        return {
            "session_id": session_id,
            "field": str(session.spec),
            "p": session.spec.p,
            "m": session.spec.m,
            "d": session.d,
            "irreducible": format_polynomial(session.spec.irreducible),
            "irreducible_coefficients": list(session.spec.irreducible),
            "mub_deviation": session.mub_deviation,
            "created_at": session.created_at.isoformat(),
            "last_accessed": session.last_accessed.isoformat(),
            "runs": list(session.runs),
        }

    async def session_close(self, session_id: str) -> Dict[str, Any]:
        """Close a session and release its tables."""
        if not self.session_manager.close_session(session_id):
            raise SessionError(
                f"Session not found: {session_id}",
                code=ErrorCode.SESSION_NOT_FOUND,
                context={"session_id": session_id},
            )
        return {"success": True, "session_id": session_id, "message": "Session closed"}

    async def session_list(self) -> Dict[str, Any]:
        """List open sessions with their fields."""
        sessions = []
        for sid in self.session_manager.list_sessions():
            session = self.session_manager.get_session(sid)
            if session:
                sessions.append(
                    {
                        "session_id": sid,
                        "field": str(session.spec),
                        "d": session.d,
                        "created_at": session.created_at.isoformat(),
                        "last_accessed": session.last_accessed.isoformat(),
                    }
                )
        return {
            "sessions": sessions,
            "count": len(sessions),
            "max_sessions": self.session_manager.max_sessions,
        }

"""Field and basis tools - arithmetic tables, MUB certification, basis vectors."""

from typing import Any, Dict, List, Optional, Tuple

from .errors import ErrorCode, FieldError
from .galois_field import FieldSpec, elements, field_tables, format_polynomial, make_field
from .mub_builder import MUB_THRESHOLD, MubTable, basis_vector, build_mub, mub_check
from .session import SessionManager

TABLE_KINDS = ("elements", "add", "mul", "neg")

OPERATION_SYMBOLS = {"add": "+", "mul": "*"}


def operation_matrix(spec: FieldSpec, kind: str = "add") -> Tuple[List[str], List[Dict[str, int]]]:
    """
    The d x d addition or multiplication table as CSV-ready rows.

    The first column holds the row operand and carries the operator symbol
    as its header; the remaining headers are the column operands 0..d-1.

    Returns:
        (columns, rows)
    """
    if kind not in OPERATION_SYMBOLS:
        raise FieldError(
            f"No operation table for kind: {kind}",
            code=ErrorCode.INVALID_PARAMETER,
            context={"kind": kind, "supported": list(OPERATION_SYMBOLS)},
        )
    tables = field_tables(spec)
    table = tables.add if kind == "add" else tables.mul
    symbol = OPERATION_SYMBOLS[kind]
    columns = [symbol] + [str(b) for b in range(spec.d)]
    rows = [
        {symbol: a, **{str(b): int(table[a, b]) for b in range(spec.d)}}
        for a in range(spec.d)
    ]
    return columns, rows


def _resolve(
    session_manager: Optional[SessionManager],
    session_id: Optional[str],
    p: Optional[int],
    m: Optional[int],
) -> MubTable:
    """Use the session's table when given, else build one for (p, m)."""
    if session_id is not None:
        if session_manager is None:
            raise FieldError("No session manager available", code=ErrorCode.INVALID_PARAMETER)
        return session_manager.require_session(session_id).table
    if p is None:
        raise FieldError(
            "Either session_id or p is required",
            code=ErrorCode.INVALID_PARAMETER,
        )
    return build_mub(make_field(p, m or 1))


def field_table_rows(spec: FieldSpec, kind: str = "add") -> list:
    """
    Flat rows describing the field.

    ``elements`` gives one row per element with its digits; ``add`` and
    ``mul`` give one row per ordered pair; ``neg`` one row per element.
    """
    tables = field_tables(spec)
    if kind == "elements":
        return [
            {
                "index": a.index,
                "digits": " ".join(str(g) for g in a.digits),
                "polynomial": format_polynomial(a.digits),
            }
            for a in elements(spec)
        ]
    if kind == "neg":
        return [{"a": a, "result": int(tables.neg[a])} for a in range(spec.d)]
    if kind in ("add", "mul"):
        table = tables.add if kind == "add" else tables.mul
        return [
            {"a": a, "b": b, "result": int(table[a, b])}
            for a in range(spec.d)
            for b in range(spec.d)
        ]
    raise FieldError(
        f"Unknown table kind: {kind}",
        code=ErrorCode.INVALID_PARAMETER,
        context={"kind": kind, "supported": list(TABLE_KINDS)},
    )


async def field_table(
    session_manager: Optional[SessionManager],
    session_id: Optional[str] = None,
    p: Optional[int] = None,
    m: Optional[int] = None,
    kind: str = "add",
) -> Dict[str, Any]:
    """
    Arithmetic table of GF(p^m).

    Args:
        session_manager: Session manager instance
        session_id: Session to read the field from (or give p and m)
        p: Odd prime characteristic
        m: Extension degree (default: 1)
        kind: "elements", "add", "mul" or "neg"

    Returns:
        Dictionary with the field description and rows; add and mul also
        carry the d x d "matrix"
    """
    spec = _resolve(session_manager, session_id, p, m).spec
    result: Dict[str, Any] = {
        "field": str(spec),
        "d": spec.d,
        "irreducible": format_polynomial(spec.irreducible),
        "kind": kind,
        "rows": field_table_rows(spec, kind),
    }
    if kind in OPERATION_SYMBOLS:
        _, matrix_rows = operation_matrix(spec, kind)
        result["matrix"] = [[row[str(b)] for b in range(spec.d)] for row in matrix_rows]
    return result


async def field_mub_check(
    session_manager: Optional[SessionManager],
    session_id: Optional[str] = None,
    p: Optional[int] = None,
    m: Optional[int] = None,
    threshold: float = MUB_THRESHOLD,
) -> Dict[str, Any]:
    """Certify the d+1 bases of GF(p^m) as mutually unbiased."""
    table = _resolve(session_manager, session_id, p, m)
    result = mub_check(table, threshold)
    result["irreducible"] = format_polynomial(table.spec.irreducible)
    return result


async def mub_vector(
    session_manager: Optional[SessionManager],
    k: int,
    t: int,
    session_id: Optional[str] = None,
    p: Optional[int] = None,
    m: Optional[int] = None,
) -> Dict[str, Any]:
    """Amplitudes of |v_t^k> in the computational basis, split into real and imaginary parts."""
    table = _resolve(session_manager, session_id, p, m)
    vector = basis_vector(table, k, t)
    return {
        "field": str(table.spec),
        "k": k,
        "t": t,
        "real": vector.real.tolist(),
        "imag": vector.imag.tolist(),
    }

"""Analysis tools - closed-form security quantities and figure tables."""

import asyncio
from typing import Any, Dict, List, Optional

from .analysis import (
    detection_probability_closed,
    eve_information_closed,
    fig2_table,
    fig3_table,
    intercept_resend_detection_closed,
    optimal_qdc_dimension,
    qdc_success_closed,
    qdc_success_monte_carlo,
)
from .tools_export import export_rows

FIG2_COLUMNS = ["d", "detection_probability"]
FIG3_COLUMNS = ["d", "c", "information_bits", "success_probability", "detection_before"]


async def security_closed_form(
    d: int,
    c: float = 0.5,
    information_bits: Optional[float] = None,
) -> Dict[str, Any]:
    """
    Closed-form P_E, I_E and (optionally) QDC success for dimension d.

    Args:
        d: Odd prime power
        c: Control-mode probability
        information_bits: Target information I for the QDC success probability
    """
    p_e = detection_probability_closed(d)
    i_e = eve_information_closed(d)
    result: Dict[str, Any] = {
        "d": d,
        "detection_probability": p_e,
        "eve_information_bits": i_e,
        "intercept_resend_independent_detection": intercept_resend_detection_closed(d, True),
    }
    if information_bits is not None:
        success = qdc_success_closed(c, p_e, information_bits, i_e)
        result.update(
            {
                "c": c,
                "information_bits": information_bits,
                "qdc_success": success,
                "detection_before": 1 - success,
            }
        )
    return result


async def _rows_or_file(
    rows: List[Dict[str, Any]],
    columns: List[str],
    output_path: Optional[str],
    format: str,
) -> Dict[str, Any]:
    if output_path:
        return await export_rows(rows, output_path, format, columns)
    return {"rows": rows, "count": len(rows)}


async def analysis_fig2(
    d_list: Optional[List[int]] = None,
    output_path: Optional[str] = None,
    format: str = "csv",
) -> Dict[str, Any]:
    """P_E against d for odd prime powers; written to output_path when given."""
    return await _rows_or_file(fig2_table(d_list), FIG2_COLUMNS, output_path, format)


async def analysis_fig3(
    c: float = 0.5,
    d_list: Optional[List[int]] = None,
    max_bits: float = 20.0,
    step: float = 1.0,
    output_path: Optional[str] = None,
    format: str = "csv",
) -> Dict[str, Any]:
    """QDC success probability over an information grid, one curve per d."""
    points = fig3_table(c, d_list, max_bits, step)
    rows = [point.to_dict() for point in points]
    result = await _rows_or_file(rows, FIG3_COLUMNS, output_path, format)
    result["best_d_at_max_bits"] = optimal_qdc_dimension(c, {p.d for p in points}, max_bits)
    return result


async def analysis_qdc_monte_carlo(
    c: float = 0.5,
    d: Optional[int] = None,
    p_e: Optional[float] = None,
    n_messages: int = 1,
    trials: int = 100_000,
    seed: int = 0,
) -> Dict[str, Any]:
    """
    Simulate attack-until-detected and compare with the closed form.

    Give either d (P_E from the closed form) or p_e directly.
    """
    if p_e is None:
        p_e = detection_probability_closed(d if d is not None else 3)
    return await asyncio.to_thread(qdc_success_monte_carlo, c, p_e, n_messages, trials, seed)

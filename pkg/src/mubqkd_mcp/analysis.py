"""
Closed-form security quantities and their Monte Carlo counterparts.

P_E   detection probability per control-mode run, (d-1)^2/d^2
I_E   information Eve gains per message-mode run, log2(d) bits
QDC   probability that Eve collects I bits before a control run exposes her,
      ((1-c) / (1-c(1-P_E)))^(I/I_E)
"""

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Tuple

import numpy as np

from .config import EveStrategy, ProtocolConfig
from .errors import AnalysisError, ErrorCode
from .protocol_sim import ProtocolContext, run_session

logger = logging.getLogger(__name__)

SIGMA_GATE = 3.0
FIG_MAX_D = 49


# ---------------------------------------------------------------------------
# Dimensions
# ---------------------------------------------------------------------------


def prime_power_decomposition(d: int) -> Optional[Tuple[int, int]]:
    """(p, m) with d = p^m by trial factorization, or None."""
    if not isinstance(d, (int, np.integer)) or d < 2:
        return None
    p = next(f for f in range(2, d + 1) if d % f == 0)
    m, rest = 0, d
    while rest % p == 0:
        rest //= p
        m += 1
    return (p, m) if rest == 1 else None


def is_odd_prime_power(d: int) -> bool:
    decomposition = prime_power_decomposition(d)
    return decomposition is not None and decomposition[0] != 2


def odd_prime_powers(limit: int = FIG_MAX_D) -> List[int]:
    """All odd prime powers in [3, limit]."""
    return [d for d in range(3, limit + 1) if is_odd_prime_power(d)]


def _require_odd_prime_power(d: int) -> None:
    if not is_odd_prime_power(d):
        decomposition = prime_power_decomposition(d)
        reason = "not a prime power" if decomposition is None else "an even prime power"
        raise AnalysisError(
            f"d={d} is {reason}; the protocol needs an odd prime power",
            code=ErrorCode.NOT_PRIME_POWER,
            context={"d": d},
        )


# ---------------------------------------------------------------------------
# Closed forms
# ---------------------------------------------------------------------------


def detection_probability_closed(d: int) -> float:
    """P_E = (d-1)^2 / d^2 for the controlled-shift attack."""
    _require_odd_prime_power(d)
    return (d - 1) ** 2 / d**2


def eve_information_closed(d: int) -> float:
    """I_E = log2(d) bits per message-mode run."""
    if not isinstance(d, (int, np.integer)) or d < 2:
        raise AnalysisError(
            f"Alphabet size must be an integer >= 2, got {d}",
            code=ErrorCode.DOMAIN_ERROR,
            context={"d": d},
        )
    return math.log2(d)


def intercept_resend_detection_closed(d: int, independent_backward_basis: bool = False) -> float:
    """
    Detection probability per control run under intercept-resend.

    Reusing the forward basis gives (d-1)^2/d^2. With an independent backward
    basis Eve escapes only when both of her bases equal Bob's, otherwise Bob's
    outcome is uniform: (1 - 1/d^2)(d-1)/d.
    """
    _require_odd_prime_power(d)
    if independent_backward_basis:
        return (1 - 1 / d**2) * (d - 1) / d
    return (d - 1) ** 2 / d**2


def expected_detection(strategy: EveStrategy, d: int, independent_backward_basis: bool = False) -> float:
    """Theoretical control-mode detection rate for a strategy."""
    if strategy == EveStrategy.NONE:
        return 0.0
    if strategy == EveStrategy.INTERCEPT_RESEND:
        return intercept_resend_detection_closed(d, independent_backward_basis)
    return detection_probability_closed(d)


def expected_eve_accuracy(
    strategy: EveStrategy, d: int, independent_backward_basis: bool = False
) -> Optional[float]:
    """Probability that Eve's guess equals Alice's symbol in message mode."""
    if strategy == EveStrategy.NONE:
        return None
    if strategy == EveStrategy.INTERCEPT_RESEND and independent_backward_basis:
        # same basis on both paths with probability 1/d, otherwise a uniform guess
        return 1 / d + (1 - 1 / d) / d
    return 1.0


def _check_probability(name: str, value: float, open_interval: bool) -> None:
    ok = 0.0 < value < 1.0 if open_interval else 0.0 <= value <= 1.0
    if not ok:
        raise AnalysisError(
            f"{name} out of range: {value}",
            code=ErrorCode.DOMAIN_ERROR,
            context={name: value},
        )


def qdc_success_closed(c: float, p_e: float, information_bits: float, eve_information_bits: float) -> float:
    """
    Probability that Eve eavesdrops information_bits without being detected.

    Args:
        c: Control-mode probability in (0, 1)
        p_e: Detection probability per control run in [0, 1]
        information_bits: Target information I >= 0
        eve_information_bits: Information per attack I_E > 0

    Returns:
        ((1-c)/(1-c(1-P_E)))^(I/I_E); exactly 1 at I = 0
    """
    _check_probability("c", c, open_interval=True)
    _check_probability("p_e", p_e, open_interval=False)
    if information_bits < 0 or eve_information_bits <= 0:
        raise AnalysisError(
            "Information must satisfy I >= 0 and I_E > 0",
            code=ErrorCode.DOMAIN_ERROR,
            context={"information_bits": information_bits, "eve_information_bits": eve_information_bits},
        )
    if information_bits == 0:
        return 1.0
    base = (1 - c) / (1 - c * (1 - p_e))
    return base ** (information_bits / eve_information_bits)


def geometric_partial_sums(c: float, p_e: float, n_terms: int) -> List[float]:
    """Partial sums of (1-c) * sum_{j<n} (c(1-P_E))^j."""
    _check_probability("c", c, open_interval=True)
    _check_probability("p_e", p_e, open_interval=False)
    if n_terms < 1:
        raise AnalysisError(
            f"n_terms must be >= 1, got {n_terms}",
            code=ErrorCode.DOMAIN_ERROR,
            context={"n_terms": n_terms},
        )
    ratio = c * (1 - p_e)
    sums, total, term = [], 0.0, 1 - c
    for _ in range(n_terms):
        total += term
        sums.append(total)
        term *= ratio
    return sums


def qdc_success_for_dimension(c: float, d: int, information_bits: float) -> float:
    """QDC success with P_E and I_E taken from the closed forms for d."""
    return qdc_success_closed(c, detection_probability_closed(d), information_bits,
                              eve_information_closed(d))


def optimal_qdc_dimension(c: float, d_list: Iterable[int], information_bits: float) -> int:
    """Dimension maximizing detection before Eve collects information_bits."""
    d_list = list(d_list)
    if not d_list:
        raise AnalysisError("Empty dimension list", code=ErrorCode.DOMAIN_ERROR)
    return max(d_list, key=lambda d: 1 - qdc_success_for_dimension(c, d, information_bits))


# ---------------------------------------------------------------------------
# Figure data
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QdcCurvePoint:
    """One point of a QDC success curve."""

    d: int
    c: float
    information_bits: float
    success_probability: float

    @property
    def detection_before(self) -> float:
        return 1 - self.success_probability

    def to_dict(self) -> Dict[str, Any]:
        row = asdict(self)
        row["detection_before"] = self.detection_before
        return row


def _validated_dimensions(d_list: Iterable[int]) -> List[int]:
    dims = sorted(set(int(d) for d in d_list))
    if not dims:
        raise AnalysisError("Empty dimension list", code=ErrorCode.DOMAIN_ERROR)
    for d in dims:
        _require_odd_prime_power(d)
    return dims


def fig2_table(d_list: Optional[Iterable[int]] = None) -> List[Dict[str, Any]]:
    """(d, P_E) rows sorted by d; defaults to every odd prime power up to 49."""
    dims = _validated_dimensions(d_list if d_list is not None else odd_prime_powers())
    return [{"d": d, "detection_probability": detection_probability_closed(d)} for d in dims]


def fig3_table(
    c: float = 0.5,
    d_list: Optional[Iterable[int]] = None,
    max_bits: float = 20.0,
    step: float = 1.0,
) -> List[QdcCurvePoint]:
    """
    Grid of QDC success probabilities over I = 0, step, ..., max_bits.

    Rows are ordered by d, then by I.
    """
    if step <= 0 or max_bits < 0:
        raise AnalysisError(
            "Grid needs step > 0 and max_bits >= 0",
            code=ErrorCode.DOMAIN_ERROR,
            context={"step": step, "max_bits": max_bits},
        )
    _check_probability("c", c, open_interval=True)
    dims = _validated_dimensions(d_list if d_list is not None else odd_prime_powers())
    n_points = int(math.floor(max_bits / step + 1e-9)) + 1
    grid = [j * step for j in range(n_points)]
    return [
        QdcCurvePoint(d=d, c=c, information_bits=i, success_probability=qdc_success_for_dimension(c, d, i))
        for d in dims
        for i in grid
    ]


# ---------------------------------------------------------------------------
# QDC Monte Carlo
# ---------------------------------------------------------------------------


def qdc_success_monte_carlo(
    c: float, p_e: float, n_messages: int, trials: int = 100_000, seed: int = 0
) -> Dict[str, Any]:
    """
    Event-level simulation of attack-until-detected.

    Each trial runs protocol rounds until Eve has attacked n_messages
    message-mode runs (success) or a control run detects her (failure).
    The closed form is evaluated at I = n_messages * I_E.
    """
    _check_probability("c", c, open_interval=True)
    _check_probability("p_e", p_e, open_interval=False)
    if n_messages < 0 or trials < 1:
        raise AnalysisError(
            "Need n_messages >= 0 and trials >= 1",
            code=ErrorCode.DOMAIN_ERROR,
            context={"n_messages": n_messages, "trials": trials},
        )
    rng = np.random.default_rng(seed)
    alive = np.ones(trials, dtype=bool)
    remaining = np.full(trials, n_messages, dtype=np.int64)
    active = alive & (remaining > 0)
    while active.any():
        idx = np.flatnonzero(active)
        control = rng.random(idx.size) < c
        detected = control & (rng.random(idx.size) < p_e)
        alive[idx[detected]] = False
        remaining[idx[~control]] -= 1
        active = alive & (remaining > 0)

    empirical = float(alive.mean())
    closed = qdc_success_closed(c, p_e, float(n_messages), 1.0)
    stderr = math.sqrt(closed * (1 - closed) / trials)
    return {
        "c": c,
        "p_e": p_e,
        "n_messages": n_messages,
        "trials": trials,
        "empirical": empirical,
        "closed_form": closed,
        "stderr": stderr,
        "passed": abs(empirical - closed) <= SIGMA_GATE * stderr if stderr > 0 else empirical == closed,
    }


# ---------------------------------------------------------------------------
# Theory versus simulation
# ---------------------------------------------------------------------------


@dataclass
class SecurityReport:
    """Closed-form quantities next to a simulated session's estimates."""

    d: int
    strategy: str
    rounds: int
    control_rounds: int
    closed_form_pe: float
    expected_detection: float
    empirical_pe: Optional[float]
    empirical_pe_stderr: Optional[float]
    ci_low: Optional[float]
    ci_high: Optional[float]
    closed_form_ie: float
    expected_eve_accuracy: Optional[float]
    empirical_eve_accuracy: Optional[float]
    empirical_eve_information: Optional[float]
    bob_decode_accuracy: Optional[float]
    conditional_detection: Dict[str, Optional[float]] = field(default_factory=dict)
    checks: Dict[str, bool] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_dict(self) -> Dict[str, Any]:
        result = asdict(self)
        result["passed"] = self.passed
        return result


def _within_gate(observed: Optional[float], expected: float, n: int) -> bool:
    if observed is None or n == 0:
        return False
    sigma = math.sqrt(expected * (1 - expected) / n)
    if sigma == 0:
        return observed == expected
    return abs(observed - expected) <= SIGMA_GATE * sigma


def compare(
    cfg: ProtocolConfig,
    records_path: Optional[str] = None,
    context: Optional[ProtocolContext] = None,
) -> SecurityReport:
    """
    Simulate a session and check it against the closed forms at 3 sigma.

    The gate uses the theoretical standard error sqrt(P(1-P)/n); a predicted
    rate of exactly 0 or 1 must be met exactly.
    """
    result = run_session(cfg, records_path=records_path, context=context)
    stats = result.stats
    d = cfg.d
    strategy = cfg.eve_strategy
    expected = expected_detection(strategy, d, cfg.independent_backward_basis)
    accuracy = expected_eve_accuracy(strategy, d, cfg.independent_backward_basis)

    rate = stats.detection_rate
    half_width = SIGMA_GATE * stats.detection_stderr if stats.detection_stderr is not None else None
    report = SecurityReport(
        d=d,
        strategy=strategy.value,
        rounds=stats.total_rounds,
        control_rounds=stats.control_rounds,
        closed_form_pe=detection_probability_closed(d),
        expected_detection=expected,
        empirical_pe=rate,
        empirical_pe_stderr=stats.detection_stderr,
        ci_low=None if half_width is None else max(0.0, rate - half_width),
        ci_high=None if half_width is None else min(1.0, rate + half_width),
        closed_form_ie=eve_information_closed(d),
        expected_eve_accuracy=accuracy,
        empirical_eve_accuracy=stats.eve_correct_fraction,
        empirical_eve_information=stats.eve_information_bits,
        bob_decode_accuracy=stats.bob_decode_accuracy,
        conditional_detection={str(k): b.rate for k, b in sorted(stats.per_basis.items())},
    )

    report.checks["detection_rate"] = _within_gate(rate, expected, stats.control_rounds)
    if strategy == EveStrategy.NONE:
        report.notes.append("no adversary")
        report.checks["decode_accuracy"] = stats.bob_decode_accuracy in (None, 1.0)
    elif accuracy is not None and stats.message_rounds:
        report.checks["eve_accuracy"] = _within_gate(
            stats.eve_correct_fraction, accuracy, stats.message_rounds
        )
    if strategy == EveStrategy.CONTROLLED_SHIFT:
        matched = stats.per_basis[cfg.eve_basis]
        report.checks["matched_basis_undetected"] = matched.detections == 0
        if cfg.eve_basis == 1:
            report.checks["bob_decode_accuracy"] = stats.bob_decode_accuracy in (None, 1.0)
        if cfg.eve_basis != 1:
            report.notes.append(f"ancilla basis {cfg.eve_basis} (non-default gate)")
    report.notes.append("asymptotic formulas only; no finite-key correction")

    logger.info(
        "Compare d=%d eve=%s empirical=%s expected=%.6f passed=%s",
        d, strategy.value, rate, expected, report.passed,
    )
    return report

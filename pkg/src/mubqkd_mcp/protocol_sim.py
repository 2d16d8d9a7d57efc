"""
Round-level simulation of the two-way protocol with pluggable eavesdroppers.

One round: Bob prepares |v_t^k> (k in 1..d), Eve interposes on the forward
path, Alice applies W (control mode, probability c) or V_0^a (message mode),
Eve interposes on the backward path, Bob measures in basis k.
"""

import logging
import math
import multiprocessing
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .config import EveStrategy, ProtocolConfig
from .errors import ErrorCode, ProtocolError
from .galois_field import FieldSpec, FieldTables, field_tables, make_field
from .mub_builder import MubTable, build_mub
from .qudit_engine import (
    PureState,
    UnitaryOp,
    apply,
    apply_controlled_shift,
    apply_on_subsystem,
    basis_state,
    control_operator,
    encoding_operator,
    measure_in_basis,
    measure_subsystem,
    product_state,
    round_rng,
    sample_outcome,
)
from .tools_export import write_ndjson

logger = logging.getLogger(__name__)

CONTROL = "control"
MESSAGE = "message"


@dataclass(frozen=True, eq=False)
class ProtocolContext:
    """Field, bases and Alice's operators, built once and shared by rounds."""

    spec: FieldSpec
    table: MubTable
    tables: FieldTables
    control: UnitaryOp
    encoders: Tuple[UnitaryOp, ...]

    @property
    def d(self) -> int:
        return self.spec.d


def build_context(table: MubTable) -> ProtocolContext:
    """Precompute W and every V_0^a for a table."""
    return ProtocolContext(
        spec=table.spec,
        table=table,
        tables=field_tables(table.spec),
        control=control_operator(table),
        encoders=tuple(encoding_operator(table, a) for a in range(table.d)),
    )


@lru_cache(maxsize=8)
def load_context(p: int, m: int) -> ProtocolContext:
    """Context for GF(p^m), cached per process."""
    return build_context(build_mub(make_field(p, m)))


@dataclass(frozen=True)
class RoundRecord:
    """Outcome of one protocol round."""

    round_index: int
    mode: str
    k: int
    t: int
    a: Optional[int]
    bob_outcome: int
    decoded: Optional[int]
    detected: Optional[bool]
    eve_guess: Optional[int] = None
    eve_basis: Optional[int] = None

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class InterceptMemory:
    """What intercept-resend Eve keeps between the two paths."""

    basis: int
    forward_outcome: int


# ---------------------------------------------------------------------------
# Eavesdroppers
# ---------------------------------------------------------------------------


def eve_intercept_resend_forward(
    state: PureState, table: MubTable, rng: np.random.Generator
) -> Tuple[PureState, InterceptMemory]:
    """Measure the traveling qudit in a uniformly drawn basis k' in 1..d and resend."""
    basis = int(rng.integers(1, table.d + 1))
    outcome, resent = measure_in_basis(state, table, basis, rng)
    return resent, InterceptMemory(basis=basis, forward_outcome=outcome)


def eve_intercept_resend_backward(
    state: PureState,
    table: MubTable,
    memory: InterceptMemory,
    rng: np.random.Generator,
    independent_basis: bool = False,
) -> Tuple[PureState, int, int]:
    """
    Measure the returning qudit and resend it.

    Returns:
        (resent state, symbol guess forward ⊖ backward, basis used)
    """
    basis = int(rng.integers(1, table.d + 1)) if independent_basis else memory.basis
    outcome, resent = measure_in_basis(state, table, basis, rng)
    tables = field_tables(table.spec)
    guess = int(tables.add[memory.forward_outcome, tables.neg[outcome]])
    return resent, guess, basis


def eve_controlled_shift_forward(
    state: PureState, table: MubTable, control_basis: int = 1
) -> PureState:
    """Entangle the traveling qudit with an ancilla prepared in |v_0^k'>."""
    ancilla = basis_state(table, control_basis, 0)
    joint = product_state(state, ancilla)
    return apply_controlled_shift(joint, table, "forward", control_basis)


def eve_controlled_shift_backward_and_measure(
    joint: PureState,
    table: MubTable,
    rng: np.random.Generator,
    control_basis: int = 1,
) -> Tuple[PureState, int]:
    """
    Apply the backward shift and measure the ancilla in the control basis.

    Returns:
        (Bob's post-measurement state, Eve's outcome used as her symbol guess)
    """
    joint = apply_controlled_shift(joint, table, "backward", control_basis)
    guess, bob_state = measure_subsystem(joint, table, control_basis, "second", rng)
    return bob_state, guess


# ---------------------------------------------------------------------------
# Rounds
# ---------------------------------------------------------------------------


def run_round(
    cfg: ProtocolConfig,
    table: MubTable,
    rng: np.random.Generator,
    round_index: int,
    context: Optional[ProtocolContext] = None,
) -> RoundRecord:
    """
    Run steps 1-4 of one protocol round.

    Args:
        cfg: Session configuration
        table: MUB table of the session field
        rng: Generator owned by this round
        round_index: Position in the session
        context: Prebuilt operators (built from table if omitted)

    Returns:
        RoundRecord for the round
    """
    ctx = context if context is not None else build_context(table)
    d = ctx.d
    strategy = cfg.eve_strategy

    # Bob prepares
    k = int(rng.integers(1, d + 1))
    t = int(rng.integers(0, d))
    traveling = basis_state(table, k, t)

    # Eve, forward path
    memory: Optional[InterceptMemory] = None
    joint: Optional[PureState] = None
    if strategy == EveStrategy.INTERCEPT_RESEND:
        traveling, memory = eve_intercept_resend_forward(traveling, table, rng)
    elif strategy == EveStrategy.CONTROLLED_SHIFT:
        joint = eve_controlled_shift_forward(traveling, table, cfg.eve_basis)

    # Alice announces only the mode afterwards, never a basis
    if rng.random() < cfg.control_prob:
        mode, a, op = CONTROL, None, ctx.control
    else:
        a = int(rng.integers(0, d))
        mode, op = MESSAGE, ctx.encoders[a]

    if joint is not None:
        joint = apply_on_subsystem(op, joint, "first")
    else:
        traveling = apply(op, traveling)

    # Eve, backward path
    eve_guess: Optional[int] = None
    eve_basis: Optional[int] = None
    if strategy == EveStrategy.INTERCEPT_RESEND:
        assert memory is not None
        traveling, eve_guess, eve_basis = eve_intercept_resend_backward(
            traveling, table, memory, rng, cfg.independent_backward_basis
        )
    elif strategy == EveStrategy.CONTROLLED_SHIFT:
        assert joint is not None
        traveling, eve_guess = eve_controlled_shift_backward_and_measure(
            joint, table, rng, cfg.eve_basis
        )
        eve_basis = cfg.eve_basis

    bob_outcome = sample_outcome(traveling, table, k, rng)

    if mode == CONTROL:
        decoded = None
        detected = bob_outcome != int(ctx.tables.neg[t])
    else:
        # bob_outcome = t ⊖ a, hence a = t ⊖ bob_outcome
        decoded = int(ctx.tables.add[t, ctx.tables.neg[bob_outcome]])
        detected = None

    record = RoundRecord(
        round_index=round_index,
        mode=mode,
        k=k,
        t=t,
        a=a,
        bob_outcome=bob_outcome,
        decoded=decoded,
        detected=detected,
        eve_guess=eve_guess,
        eve_basis=eve_basis,
    )
    logger.debug("Round %s", record)
    return record


# ---------------------------------------------------------------------------
# Sessions
# ---------------------------------------------------------------------------


@dataclass
class BasisDetection:
    """Control-mode counts for one preparation basis."""

    control_rounds: int = 0
    detections: int = 0

    @property
    def rate(self) -> Optional[float]:
        return self.detections / self.control_rounds if self.control_rounds else None


@dataclass
class SessionStats:
    """Aggregate estimates over a session's rounds."""

    d: int
    total_rounds: int
    control_rounds: int
    message_rounds: int
    detections: int
    detection_rate: Optional[float]
    detection_stderr: Optional[float]
    message_decode_errors: int
    bob_decode_accuracy: Optional[float]
    eve_correct_fraction: Optional[float]
    eve_information_bits: Optional[float]
    per_basis: Dict[int, BasisDetection] = field(default_factory=dict)

    @property
    def control_fraction(self) -> float:
        return self.control_rounds / self.total_rounds if self.total_rounds else 0.0

    def to_dict(self) -> Dict[str, Any]:
        result = asdict(self)
        result["control_fraction"] = self.control_fraction
        result["per_basis"] = {
            str(k): {
                "control_rounds": b.control_rounds,
                "detections": b.detections,
                "rate": b.rate,
            }
            for k, b in sorted(self.per_basis.items())
        }
        return result


@dataclass
class SessionResult:
    """Stats plus the full record stream of one session."""

    config: ProtocolConfig
    stats: SessionStats
    records: List[RoundRecord]


def empirical_mutual_information(pairs: Sequence[Tuple[int, int]], d: int) -> Optional[float]:
    """Plug-in estimate of I(X;Y) in bits from observed (x, y) pairs."""
    if not pairs:
        return None
    counts = np.zeros((d, d))
    for x, y in pairs:
        counts[x, y] += 1
    joint = counts / counts.sum()
    px = joint.sum(axis=1, keepdims=True)
    py = joint.sum(axis=0, keepdims=True)
    mask = joint > 0
    return float(np.sum(joint[mask] * np.log2(joint[mask] / (px @ py)[mask])))


def aggregate(records: Iterable[RoundRecord], d: int) -> SessionStats:
    """Fold a record stream into SessionStats."""
    total = control = message = detections = decode_errors = 0
    eve_pairs: List[Tuple[int, int]] = []
    per_basis: Dict[int, BasisDetection] = {k: BasisDetection() for k in range(1, d + 1)}

    for rec in records:
        total += 1
        if rec.mode == CONTROL:
            control += 1
            per_basis[rec.k].control_rounds += 1
            if rec.detected:
                detections += 1
                per_basis[rec.k].detections += 1
        else:
            message += 1
            if rec.decoded != rec.a:
                decode_errors += 1
            if rec.eve_guess is not None and rec.a is not None:
                eve_pairs.append((rec.a, rec.eve_guess))

    rate = detections / control if control else None
    stderr = math.sqrt(rate * (1 - rate) / control) if rate is not None else None
    eve_correct = (
        sum(1 for a, g in eve_pairs if a == g) / len(eve_pairs) if eve_pairs else None
    )
    return SessionStats(
        d=d,
        total_rounds=total,
        control_rounds=control,
        message_rounds=message,
        detections=detections,
        detection_rate=rate,
        detection_stderr=stderr,
        message_decode_errors=decode_errors,
        bob_decode_accuracy=(message - decode_errors) / message if message else None,
        eve_correct_fraction=eve_correct,
        eve_information_bits=empirical_mutual_information(eve_pairs, d),
        per_basis=per_basis,
    )


def _run_chunk(
    cfg: ProtocolConfig, start: int, stop: int, ctx: Optional[ProtocolContext] = None
) -> List[RoundRecord]:
    if ctx is None:
        ctx = load_context(cfg.p, cfg.m)
    return [
        run_round(cfg, ctx.table, round_rng(cfg.seed, i), i, ctx) for i in range(start, stop)
    ]


def _chunks(rounds: int, workers: int) -> List[Tuple[int, int]]:
    size = math.ceil(rounds / (workers * 4))
    return [(s, min(s + size, rounds)) for s in range(0, rounds, size)]


def _check_context(cfg: ProtocolConfig, ctx: ProtocolContext) -> None:
    if (ctx.spec.p, ctx.spec.m) != (cfg.p, cfg.m):
        raise ProtocolError(
            f"Context is built for {ctx.spec}, configuration asks for GF({cfg.p}^{cfg.m})",
            code=ErrorCode.FIELD_MISMATCH,
            context={"context_field": str(ctx.spec), "p": cfg.p, "m": cfg.m},
        )


def run_session(
    cfg: ProtocolConfig,
    records_path: Optional[str] = None,
    context: Optional[ProtocolContext] = None,
) -> SessionResult:
    """
    Run cfg.rounds independent rounds and aggregate them.

    Each round draws from its own generator keyed by (seed, round_index), so
    sequential and parallel execution yield the same record stream.

    Args:
        cfg: Session configuration
        records_path: Optional NDJSON file receiving every RoundRecord
        context: Prebuilt context for cfg's field (e.g. an MCP session's);
            worker processes always build their own

    Returns:
        SessionResult with stats and records sorted by round_index

    Raises:
        ProtocolError: FIELD_MISMATCH if context belongs to another field
    """
    if context is not None:
        _check_context(cfg, context)
    workers = cfg.effective_workers
    logger.info(
        "Session start: d=%d rounds=%d c=%.3f eve=%s seed=%d workers=%d",
        cfg.d, cfg.rounds, cfg.control_prob, cfg.eve_strategy.value, cfg.seed, workers,
    )
    if workers == 1:
        records = _run_chunk(cfg, 0, cfg.rounds, context)
    else:
        records = []
        mp_ctx = multiprocessing.get_context("spawn")
        with ProcessPoolExecutor(max_workers=workers, mp_context=mp_ctx) as pool:
            futures = [pool.submit(_run_chunk, cfg, s, e) for s, e in _chunks(cfg.rounds, workers)]
            for future in futures:
                records.extend(future.result())
        records.sort(key=lambda r: r.round_index)

    if len(records) != cfg.rounds:
        raise ProtocolError(
            f"Expected {cfg.rounds} records, got {len(records)}",
            code=ErrorCode.INTERNAL_ERROR,
        )

    stats = aggregate(records, cfg.d)
    logger.info(
        "Session end: control=%d message=%d detection_rate=%s eve_correct=%s",
        stats.control_rounds, stats.message_rounds, stats.detection_rate,
        stats.eve_correct_fraction,
    )
    if records_path:
        write_records(records, records_path)
    return SessionResult(config=cfg, stats=stats, records=records)


def write_records(records: Iterable[RoundRecord], path: str) -> int:
    """Persist a record stream as newline-delimited JSON."""
    return write_ndjson((rec.to_dict() for rec in records), path)

"""
Exact state-vector mechanics for one qudit and for the Bob ⊗ Eve pair.

Joint states use the Kronecker ordering of ``numpy.kron``: the first factor
(Bob's traveling qudit) is the major index, so a joint amplitude vector
reshapes to a (d, d) matrix with Bob on rows and Eve on columns.
"""

import logging
from dataclasses import dataclass
from typing import Literal, Tuple, Union

import numpy as np

from .errors import ErrorCode, StateError
from .galois_field import FieldElement, field_tables
from .mub_builder import MubTable, basis_matrix, basis_vector

logger = logging.getLogger(__name__)

NORM_TOL = 1e-10
UNITARY_TOL = 1e-10
PROB_SUM_TOL = 1e-8

Direction = Literal["forward", "backward"]
Subsystem = Literal["first", "second"]


@dataclass(frozen=True, eq=False)
class PureState:
    """A normalized amplitude vector of length d or d^2."""

    dim: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        if self.amplitudes.shape != (self.dim,):
            raise StateError(
                f"Amplitude shape {self.amplitudes.shape} does not match dim {self.dim}",
                code=ErrorCode.DIMENSION_MISMATCH,
                context={"dim": self.dim},
            )
        norm = float(np.linalg.norm(self.amplitudes))
        if abs(norm - 1.0) > NORM_TOL:
            raise StateError(
                f"State norm {norm:.12f} is not 1",
                code=ErrorCode.CORRUPTED_STATE,
                context={"norm": norm},
            )


@dataclass(frozen=True, eq=False)
class UnitaryOp:
    """A dim x dim unitary in the computational (product) basis."""

    dim: int
    matrix: np.ndarray

    def __post_init__(self) -> None:
        if self.matrix.shape != (self.dim, self.dim):
            raise StateError(
                f"Matrix shape {self.matrix.shape} does not match dim {self.dim}",
                code=ErrorCode.DIMENSION_MISMATCH,
                context={"dim": self.dim},
            )
        defect = unitarity_defect(self.matrix)
        if defect > UNITARY_TOL:
            raise StateError(
                f"Operator is not unitary (defect {defect:.3e})",
                code=ErrorCode.NON_UNITARY,
                context={"defect": defect},
            )


def unitarity_defect(matrix: np.ndarray) -> float:
    """max |U^dagger U - I| entry."""
    eye = np.eye(matrix.shape[0])
    return float(np.max(np.abs(matrix.conj().T @ matrix - eye)))


def make_state(amplitudes: np.ndarray) -> PureState:
    """Wrap an amplitude vector, checking its norm."""
    amplitudes = np.asarray(amplitudes, dtype=np.complex128)
    return PureState(dim=amplitudes.shape[0], amplitudes=amplitudes)


def basis_state(table: MubTable, k: int, t: int) -> PureState:
    """|v_t^k> as a state."""
    return make_state(basis_vector(table, k, t))


def product_state(first: PureState, second: PureState) -> PureState:
    """first ⊗ second."""
    return make_state(np.kron(first.amplitudes, second.amplitudes))


def state_distance(a: PureState, b: PureState) -> float:
    """Euclidean distance, sensitive to global phase."""
    return float(np.linalg.norm(a.amplitudes - b.amplitudes))


def fidelity(a: PureState, b: PureState) -> float:
    """|<a|b>|^2."""
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


# ---------------------------------------------------------------------------
# Protocol operators
# ---------------------------------------------------------------------------


def encoding_operator(table: MubTable, a: Union[int, FieldElement]) -> UnitaryOp:
    """V_0^a: diagonal with omega^(t ⊙ a) at computational index t."""
    d = table.d
    a = int(a)
    if not 0 <= a < d:
        raise StateError(
            f"Symbol {a} out of range for d={d}",
            code=ErrorCode.INDEX_OUT_OF_RANGE,
            context={"a": a, "d": d},
        )
    tables = field_tables(table.spec)
    phases = tables.first_digit[tables.mul[np.arange(d), a]]
    diagonal = np.exp(2j * np.pi * phases / table.spec.p)
    return UnitaryOp(dim=d, matrix=np.diag(diagonal))


def control_operator(table: MubTable) -> UnitaryOp:
    """W: permutation sending computational index t to ⊖t."""
    d = table.d
    neg = field_tables(table.spec).neg
    matrix = np.zeros((d, d), dtype=np.complex128)
    matrix[neg, np.arange(d)] = 1.0
    return UnitaryOp(dim=d, matrix=matrix)


def controlled_shift(
    table: MubTable,
    direction: Direction = "backward",
    control_basis: int = 1,
) -> UnitaryOp:
    """
    Controlled shift on (traveling qudit, ancilla).

    In the product basis |v_{t1}^k'>|v_{t2}^k'> with k' = control_basis the
    backward gate maps t2 -> t2 ⊖ t1 and the forward gate maps t2 -> t2 ⊕ t1.
    The computational basis is not allowed as control basis.

    Args:
        table: MUB table of the field
        direction: "forward" (inverse gate) or "backward"
        control_basis: Basis k' in 1..d defining the gate

    Returns:
        UnitaryOp of dimension d^2
    """
    d = table.d
    if not 1 <= control_basis <= d:
        raise StateError(
            f"Control basis {control_basis} must lie in 1..{d}",
            code=ErrorCode.INDEX_OUT_OF_RANGE,
            context={"control_basis": control_basis, "d": d},
        )
    if direction not in ("forward", "backward"):
        raise StateError(
            f"Unknown shift direction: {direction}",
            code=ErrorCode.INVALID_PARAMETER,
            context={"direction": direction},
        )
    tables = field_tables(table.spec)
    t1, t2 = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    if direction == "backward":
        target = tables.add[t2, tables.neg[t1]]
    else:
        target = tables.add[t2, t1]

    permutation = np.zeros((d * d, d * d), dtype=np.complex128)
    permutation[(t1 * d + target).ravel(), (t1 * d + t2).ravel()] = 1.0

    basis = basis_matrix(table, control_basis)
    change = np.kron(basis, basis)
    return UnitaryOp(dim=d * d, matrix=change @ permutation @ change.conj().T)


def apply(op: UnitaryOp, state: PureState) -> PureState:
    """op |state>."""
    if op.dim != state.dim:
        raise StateError(
            f"Operator dim {op.dim} does not match state dim {state.dim}",
            code=ErrorCode.DIMENSION_MISMATCH,
            context={"op_dim": op.dim, "state_dim": state.dim},
        )
    return make_state(op.matrix @ state.amplitudes)


def embed_on_subsystem(op: UnitaryOp, which: Subsystem = "first") -> UnitaryOp:
    """op ⊗ I (first) or I ⊗ op (second)."""
    eye = np.eye(op.dim)
    if which == "first":
        matrix = np.kron(op.matrix, eye)
    elif which == "second":
        matrix = np.kron(eye, op.matrix)
    else:
        raise StateError(
            f"Unknown subsystem: {which}",
            code=ErrorCode.INVALID_PARAMETER,
            context={"which": which},
        )
    return UnitaryOp(dim=op.dim * op.dim, matrix=matrix)


# ---------------------------------------------------------------------------
# Measurement
# ---------------------------------------------------------------------------


def round_rng(seed: int, round_index: int) -> np.random.Generator:
    """Independent generator for one round, keyed by (seed, round_index)."""
    return np.random.default_rng(np.random.SeedSequence([seed, round_index]))


def _sample(probs: np.ndarray, rng: np.random.Generator) -> int:
    total = float(probs.sum())
    if abs(total - 1.0) > PROB_SUM_TOL:
        raise StateError(
            f"Outcome probabilities sum to {total:.12f}",
            code=ErrorCode.CORRUPTED_STATE,
            context={"total": total},
        )
    # Inverse CDF on one uniform draw
    cdf = np.cumsum(np.clip(probs, 0.0, None))
    index = int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))
    return min(index, len(probs) - 1)


def _check_basis(table: MubTable, k: int) -> None:
    if not 0 <= k <= table.d:
        raise StateError(
            f"Basis {k} out of range for d={table.d}",
            code=ErrorCode.INDEX_OUT_OF_RANGE,
            context={"k": k, "d": table.d},
        )


def outcome_probabilities(state: PureState, table: MubTable, k: int) -> np.ndarray:
    """Born probabilities |<v_t^k|psi>|^2 for t = 0..d-1."""
    _check_basis(table, k)
    if state.dim != table.d:
        raise StateError(
            f"Single-qudit measurement needs dim {table.d}, got {state.dim}",
            code=ErrorCode.DIMENSION_MISMATCH,
            context={"dim": state.dim, "d": table.d},
        )
    return np.abs(table.vectors[k].conj() @ state.amplitudes) ** 2


def sample_outcome(state: PureState, table: MubTable, k: int, rng: np.random.Generator) -> int:
    """Outcome of a basis-k measurement when the post-measurement state is not needed."""
    return _sample(outcome_probabilities(state, table, k), rng)


def measure_in_basis(
    state: PureState, table: MubTable, k: int, rng: np.random.Generator
) -> Tuple[int, PureState]:
    """Projective measurement in basis k; returns (outcome, |v_outcome^k>)."""
    t = sample_outcome(state, table, k, rng)
    return t, basis_state(table, k, t)


def _as_matrix(joint: PureState, d: int) -> np.ndarray:
    if joint.dim != d * d:
        raise StateError(
            f"Joint state needs dim {d * d}, got {joint.dim}",
            code=ErrorCode.DIMENSION_MISMATCH,
            context={"dim": joint.dim, "d": d},
        )
    return joint.amplitudes.reshape(d, d)


def subsystem_probabilities(
    joint: PureState, table: MubTable, k: int, which: Subsystem = "first"
) -> np.ndarray:
    """Marginal outcome distribution of one factor measured in basis k."""
    _check_basis(table, k)
    psi = _as_matrix(joint, table.d)
    bra = table.vectors[k].conj()
    if which == "first":
        amplitudes = bra @ psi
        return np.sum(np.abs(amplitudes) ** 2, axis=1)
    if which == "second":
        amplitudes = psi @ bra.T
        return np.sum(np.abs(amplitudes) ** 2, axis=0)
    raise StateError(
        f"Unknown subsystem: {which}",
        code=ErrorCode.INVALID_PARAMETER,
        context={"which": which},
    )


def subsystem_outcome_probability(
    joint: PureState, table: MubTable, k: int, t: int, which: Subsystem = "first"
) -> float:
    """Exact probability that measuring one factor in basis k gives t."""
    if not 0 <= t < table.d:
        raise StateError(
            f"Outcome {t} out of range for d={table.d}",
            code=ErrorCode.INDEX_OUT_OF_RANGE,
            context={"t": t, "d": table.d},
        )
    return float(subsystem_probabilities(joint, table, k, which)[t])


def measure_subsystem(
    joint: PureState,
    table: MubTable,
    k: int,
    which: Subsystem,
    rng: np.random.Generator,
) -> Tuple[int, PureState]:
    """
    Measure one factor of a joint state in basis k.

    Returns:
        (outcome, post-measurement state of the other factor)
    """
    t = _sample(subsystem_probabilities(joint, table, k, which), rng)
    psi = _as_matrix(joint, table.d)
    bra = table.vectors[k, t].conj()
    remaining = bra @ psi if which == "first" else psi @ bra
    return t, make_state(remaining / np.linalg.norm(remaining))


# ---------------------------------------------------------------------------
# Structured joint-state application
# ---------------------------------------------------------------------------


def apply_on_subsystem(op: UnitaryOp, joint: PureState, which: Subsystem = "first") -> PureState:
    """Same result as apply(embed_on_subsystem(op, which), joint) in O(d^3)."""
    psi = _as_matrix(joint, op.dim)
    if which == "first":
        out = op.matrix @ psi
    elif which == "second":
        out = psi @ op.matrix.T
    else:
        raise StateError(
            f"Unknown subsystem: {which}",
            code=ErrorCode.INVALID_PARAMETER,
            context={"which": which},
        )
    return make_state(out.reshape(-1))


def apply_controlled_shift(
    joint: PureState,
    table: MubTable,
    direction: Direction = "backward",
    control_basis: int = 1,
) -> PureState:
    """Same result as apply(controlled_shift(...), joint) without the d^2 x d^2 matrix.

    Coefficients in the control basis are C = B^dagger psi conj(B); the gate
    permutes C[t1, t2] to C[t1, t2 ∓ t1].
    """
    d = table.d
    if not 1 <= control_basis <= d:
        raise StateError(
            f"Control basis {control_basis} must lie in 1..{d}",
            code=ErrorCode.INDEX_OUT_OF_RANGE,
            context={"control_basis": control_basis, "d": d},
        )
    tables = field_tables(table.spec)
    psi = _as_matrix(joint, d)
    basis = table.vectors[control_basis].T
    coeffs = basis.conj().T @ psi @ basis.conj()

    t1, t2 = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    if direction == "backward":
        target = tables.add[t2, tables.neg[t1]]
    elif direction == "forward":
        target = tables.add[t2, t1]
    else:
        raise StateError(
            f"Unknown shift direction: {direction}",
            code=ErrorCode.INVALID_PARAMETER,
            context={"direction": direction},
        )
    shifted = np.zeros_like(coeffs)
    shifted[t1, target] = coeffs[t1, t2]
    return make_state((basis @ shifted @ basis.T).reshape(-1))

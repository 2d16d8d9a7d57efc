"""
Construction and numerical certification of the d+1 mutually unbiased bases.

Basis 0 is the computational basis. For k = 1..d and t = 0..d-1 the amplitude
of |v_t^k> at computational index q is

    (1/sqrt d) * omega^(⊖q ⊙ t) * (omega^((k-1) ⊙ q ⊙ q))^(1/2)

with omega = exp(2*pi*i/p), omega^g = omega^(g_0), and the square root taken
as omega^(g_0 * 2^-1 mod p).
"""

import cmath
import logging
import math
from dataclasses import dataclass
from typing import Any, Dict

import numpy as np

from .errors import ErrorCode, FieldError, StateError
from .galois_field import FieldElement, FieldSpec, check_element, field_tables

logger = logging.getLogger(__name__)

MUB_THRESHOLD = 1e-9


@dataclass(frozen=True, eq=False)
class MubTable:
    """The d+1 bases as a read-only (d+1, d, d) complex array indexed [k, t, q]."""

    spec: FieldSpec
    vectors: np.ndarray

    @property
    def d(self) -> int:
        return self.spec.d


def _inv2(p: int) -> int:
    if p % 2 == 0:
        raise FieldError(
            "The square-root convention needs an odd characteristic",
            code=ErrorCode.EVEN_CHARACTERISTIC,
            context={"p": p},
        )
    return pow(2, -1, p)


def omega_power(spec: FieldSpec, g: FieldElement) -> complex:
    """omega^g = exp(2*pi*i*g_0/p)."""
    check_element(spec, g)
    return cmath.exp(2j * math.pi * g.digits[0] / spec.p)


def half_omega_power(spec: FieldSpec, g: FieldElement) -> complex:
    """(omega^g)^(1/2) = exp(2*pi*i*(g_0 * 2^-1 mod p)/p)."""
    check_element(spec, g)
    inv2 = _inv2(spec.p)
    return cmath.exp(2j * math.pi * ((g.digits[0] * inv2) % spec.p) / spec.p)


def build_mub(spec: FieldSpec) -> MubTable:
    """
    Build all d+1 bases for an odd-prime-power field.

    Exponents are evaluated with the field tables, so every ⊙ and ⊖ is a field
    operation and only first digits reach the complex exponential.
    """
    _inv2(spec.p)
    d, p = spec.d, spec.p
    tables = field_tables(spec)
    inv2 = pow(2, -1, p)

    vectors = np.zeros((d + 1, d, d), dtype=np.complex128)
    vectors[0] = np.eye(d, dtype=np.complex128)

    q = np.arange(d)
    # linear[t, q] = first digit of (⊖q) ⊙ t
    linear = tables.first_digit[tables.mul[tables.neg[q][None, :], q[:, None]]]
    q_squared = tables.mul[q, q]
    for k in range(1, d + 1):
        quadratic = tables.first_digit[tables.mul[k - 1, q_squared]]
        exponent = (linear + (quadratic * inv2) % p) % p
        vectors[k] = np.exp(2j * np.pi * exponent / p) / math.sqrt(d)

    vectors.flags.writeable = False
    table = MubTable(spec=spec, vectors=vectors)
    logger.info("Built %d bases for %s (deviation %.3e)", d + 1, spec, mub_deviation(table))
    return table


def mub_deviation(table: MubTable) -> float:
    """
    Largest violation of orthonormality within bases and of 1/sqrt(d)
    overlap magnitude across bases.
    """
    vectors = np.asarray(table.vectors)
    n_bases, d, _ = vectors.shape
    flat = vectors.reshape(n_bases * d, d)
    overlaps = np.abs(flat.conj() @ flat.T)

    expected = np.full_like(overlaps, 1.0 / math.sqrt(d))
    for k in range(n_bases):
        block = slice(k * d, (k + 1) * d)
        expected[block, block] = np.eye(d)
    return float(np.max(np.abs(overlaps - expected)))


def mub_check(table: MubTable, threshold: float = MUB_THRESHOLD) -> Dict[str, Any]:
    """Certification summary used by the mub-check command."""
    deviation = mub_deviation(table)
    return {
        "p": table.spec.p,
        "m": table.spec.m,
        "d": table.d,
        "deviation": deviation,
        "threshold": threshold,
        "passed": deviation < threshold,
    }


def _check_index(table: MubTable, k: int, t: int) -> None:
    if not 0 <= k <= table.d or not 0 <= t < table.d:
        raise StateError(
            f"Basis vector ({k}, {t}) out of range for d={table.d}",
            code=ErrorCode.INDEX_OUT_OF_RANGE,
            context={"k": k, "t": t, "d": table.d},
        )


def basis_vector(table: MubTable, k: int, t: int) -> np.ndarray:
    """Copy of |v_t^k> in the computational basis."""
    _check_index(table, k, t)
    return np.array(table.vectors[k, t])


def basis_matrix(table: MubTable, k: int) -> np.ndarray:
    """Matrix whose columns are the vectors of basis k."""
    _check_index(table, k, 0)
    return np.array(table.vectors[k].T)

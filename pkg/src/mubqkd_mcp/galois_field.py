"""
Exact arithmetic in GF(p^m) for odd primes p.

Elements are identified with the integers 0..d-1 through their base-p digit
tuples (g_0, ..., g_{m-1}), index = sum(g_n * p**n). Addition is digit-wise
mod p; multiplication multiplies the digit polynomials and reduces them by a
deterministic monic irreducible polynomial of degree m.
"""

import itertools
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, List, NamedTuple, Sequence, Tuple

import numpy as np

from .errors import ErrorCode, FieldError

logger = logging.getLogger(__name__)

# Brute-force irreducibility and exhaustive property checks are sized for this.
MAX_SUPPORTED_ORDER = 49


def is_prime(n: int) -> bool:
    """Trial-division primality test."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class FieldSpec:
    """A concrete finite field GF(p^m).

    ``irreducible`` holds m+1 coefficients, lowest degree first, leading 1.
    For m == 1 it is the convention value ``x`` = (0, 1) and reduction is
    plain arithmetic mod p.
    """

    p: int
    m: int
    irreducible: Tuple[int, ...]

    @property
    def d(self) -> int:
        return self.p**self.m

    def __str__(self) -> str:
        return f"GF({self.p}^{self.m})"


@dataclass(frozen=True)
class FieldElement:
    """An element of GF(p^m) carried in both integer and digit form."""

    index: int
    digits: Tuple[int, ...]

    def __int__(self) -> int:
        return self.index


# ---------------------------------------------------------------------------
# Polynomials over GF(p), coefficient lists lowest degree first
# ---------------------------------------------------------------------------


def _trim(poly: List[int]) -> List[int]:
    while len(poly) > 1 and poly[-1] == 0:
        poly.pop()
    return poly


def _poly_mod(num: Sequence[int], den: Sequence[int], p: int) -> List[int]:
    """Remainder of num / den over GF(p); den must have a nonzero leading term."""
    rem = [c % p for c in num]
    den = _trim([c % p for c in den])
    lead_inv = pow(den[-1], p - 2, p)
    shift = len(rem) - len(den)
    while shift >= 0:
        coef = (rem[shift + len(den) - 1] * lead_inv) % p
        if coef:
            for i, c in enumerate(den):
                rem[shift + i] = (rem[shift + i] - coef * c) % p
        shift -= 1
    return _trim(rem[: max(len(den) - 1, 1)])


def is_irreducible(p: int, coeffs: Sequence[int]) -> bool:
    """Check irreducibility of a monic polynomial by searching for monic factors.

    Every reducible polynomial of degree m has a monic factor of degree at
    most m // 2, so testing those degrees exhaustively is sufficient.
    """
    m = len(coeffs) - 1
    if m < 1:
        return False
    for deg in range(1, m // 2 + 1):
        for lower in itertools.product(range(p), repeat=deg):
            divisor = list(lower) + [1]
            if _poly_mod(coeffs, divisor, p) == [0]:
                return False
    return True


def find_irreducible(p: int, m: int) -> Tuple[int, ...]:
    """Smallest monic irreducible polynomial of degree m over GF(p).

    Candidates are scanned by increasing integer code sum(c_n * p**n) of their
    non-leading coefficients, the same ordering used for field elements.
    """
    _check_characteristic(p)
    if m < 2:
        raise FieldError(
            f"Irreducible search needs degree >= 2, got {m}",
            code=ErrorCode.INVALID_DEGREE,
            context={"p": p, "m": m},
        )
    for code in range(p**m):
        lower = _to_digits(code, p, m)
        candidate = tuple(lower) + (1,)
        if is_irreducible(p, candidate):
            return candidate
    raise FieldError(  # pragma: no cover - one always exists
        f"No irreducible polynomial of degree {m} over GF({p})",
        code=ErrorCode.INTERNAL_ERROR,
    )


def _check_characteristic(p: int) -> None:
    if not is_prime(p):
        raise FieldError(
            f"Characteristic {p} is not prime",
            code=ErrorCode.NOT_PRIME,
            context={"p": p},
        )
    if p == 2:
        raise FieldError(
            "Characteristic 2 is out of scope: the control operator reduces to the identity",
            code=ErrorCode.EVEN_CHARACTERISTIC,
            context={"p": p},
        )


def make_field(p: int, m: int) -> FieldSpec:
    """
    Construct GF(p^m) for an odd prime p.

    Args:
        p: Odd prime characteristic
        m: Extension degree (>= 1)

    Returns:
        FieldSpec with a deterministic reduction polynomial

    Raises:
        FieldError: NOT_PRIME, EVEN_CHARACTERISTIC or INVALID_DEGREE
    """
    _check_characteristic(p)
    if m < 1:
        raise FieldError(
            f"Extension degree must be >= 1, got {m}",
            code=ErrorCode.INVALID_DEGREE,
            context={"p": p, "m": m},
        )
    if p**m > MAX_SUPPORTED_ORDER:
        logger.warning("GF(%d^%d) has %d elements; support above %d is best-effort",
                       p, m, p**m, MAX_SUPPORTED_ORDER)

    irreducible = (0, 1) if m == 1 else find_irreducible(p, m)
    spec = FieldSpec(p=p, m=m, irreducible=irreducible)
    logger.info("Constructed %s with reduction polynomial %s", spec, format_polynomial(irreducible))
    return spec


def format_polynomial(coeffs: Sequence[int]) -> str:
    """Render coefficients (lowest degree first) as e.g. ``x^2 + 1``."""
    terms = []
    for deg in range(len(coeffs) - 1, -1, -1):
        c = coeffs[deg]
        if c == 0:
            continue
        base = "" if deg == 0 else ("x" if deg == 1 else f"x^{deg}")
        if deg == 0:
            terms.append(str(c))
        else:
            terms.append(base if c == 1 else f"{c}{base}")
    return " + ".join(terms) if terms else "0"


# ---------------------------------------------------------------------------
# Element codec
# ---------------------------------------------------------------------------


def _to_digits(index: int, p: int, m: int) -> Tuple[int, ...]:
    digits = []
    for _ in range(m):
        index, r = divmod(index, p)
        digits.append(r)
    return tuple(digits)


def element(spec: FieldSpec, index: int) -> FieldElement:
    """Encode an integer in [0, d) as a field element."""
    if not 0 <= index < spec.d:
        raise FieldError(
            f"Element index {index} out of range for {spec}",
            code=ErrorCode.ELEMENT_OUT_OF_RANGE,
            context={"index": index, "d": spec.d},
        )
    return FieldElement(index=index, digits=_to_digits(index, spec.p, spec.m))


def from_digits(spec: FieldSpec, digits: Iterable[int]) -> FieldElement:
    """Build an element from its base-p digits (lowest first)."""
    digits = tuple(digits)
    if len(digits) != spec.m or any(not 0 <= g < spec.p for g in digits):
        raise FieldError(
            f"Invalid digit tuple {digits} for {spec}",
            code=ErrorCode.ELEMENT_OUT_OF_RANGE,
            context={"digits": list(digits)},
        )
    index = sum(g * spec.p**n for n, g in enumerate(digits))
    return FieldElement(index=index, digits=digits)


def elements(spec: FieldSpec) -> List[FieldElement]:
    """All field elements in index order."""
    return [element(spec, i) for i in range(spec.d)]


def check_element(spec: FieldSpec, a: FieldElement) -> None:
    """Raise ELEMENT_OUT_OF_RANGE unless a belongs to spec."""
    if not 0 <= a.index < spec.d or len(a.digits) != spec.m:
        raise FieldError(
            f"Element {a.index} is not valid for {spec}",
            code=ErrorCode.ELEMENT_OUT_OF_RANGE,
            context={"index": a.index, "d": spec.d},
        )


# ---------------------------------------------------------------------------
# Field operations
# ---------------------------------------------------------------------------


def field_add(spec: FieldSpec, a: FieldElement, b: FieldElement) -> FieldElement:
    """a ⊕ b, digit-wise mod p."""
    check_element(spec, a)
    check_element(spec, b)
    return from_digits(spec, ((x + y) % spec.p for x, y in zip(a.digits, b.digits)))


def field_neg(spec: FieldSpec, a: FieldElement) -> FieldElement:
    """⊖a, digit-wise additive inverse."""
    check_element(spec, a)
    return from_digits(spec, ((-x) % spec.p for x in a.digits))


def field_sub(spec: FieldSpec, a: FieldElement, b: FieldElement) -> FieldElement:
    """a ⊖ b."""
    return field_add(spec, a, field_neg(spec, b))


def field_mul(spec: FieldSpec, a: FieldElement, b: FieldElement) -> FieldElement:
    """a ⊙ b: digit polynomial product reduced by the field polynomial."""
    check_element(spec, a)
    check_element(spec, b)
    p = spec.p
    if spec.m == 1:
        return element(spec, (a.index * b.index) % p)
    product = [0] * (2 * spec.m - 1)
    for i, x in enumerate(a.digits):
        if x:
            for j, y in enumerate(b.digits):
                product[i + j] = (product[i + j] + x * y) % p
    rem = _poly_mod(product, spec.irreducible, p)
    rem = rem + [0] * (spec.m - len(rem))
    return from_digits(spec, rem)


def field_pow(spec: FieldSpec, a: FieldElement, n: int) -> FieldElement:
    """a raised to a non-negative integer power by square-and-multiply."""
    if n < 0:
        raise FieldError(
            f"Negative exponent {n}; use field_inv",
            code=ErrorCode.INVALID_PARAMETER,
            context={"n": n},
        )
    result = element(spec, 1)
    base = a
    while n:
        if n & 1:
            result = field_mul(spec, result, base)
        base = field_mul(spec, base, base)
        n >>= 1
    return result


def field_inv(spec: FieldSpec, a: FieldElement) -> FieldElement:
    """Multiplicative inverse, a^(d-2) in the cyclic group of order d-1."""
    check_element(spec, a)
    if a.index == 0:
        raise FieldError(
            "No inverse of zero",
            code=ErrorCode.NO_INVERSE,
            context={"field": str(spec)},
        )
    return field_pow(spec, a, spec.d - 2)


# ---------------------------------------------------------------------------
# Tables
# ---------------------------------------------------------------------------


class FieldTables(NamedTuple):
    """Index-level lookup tables for vectorized computation."""

    add: np.ndarray
    mul: np.ndarray
    neg: np.ndarray
    first_digit: np.ndarray


@lru_cache(maxsize=None)
def field_tables(spec: FieldSpec) -> FieldTables:
    """Addition, multiplication and negation tables indexed by element index."""
    elems = elements(spec)
    d = spec.d
    add = np.empty((d, d), dtype=np.int64)
    mul = np.empty((d, d), dtype=np.int64)
    for a in elems:
        for b in elems[a.index:]:
            add[a.index, b.index] = add[b.index, a.index] = field_add(spec, a, b).index
            mul[a.index, b.index] = mul[b.index, a.index] = field_mul(spec, a, b).index
    neg = np.array([field_neg(spec, a).index for a in elems], dtype=np.int64)
    first_digit = np.array([a.digits[0] for a in elems], dtype=np.int64)
    for table in (add, mul, neg, first_digit):
        table.flags.writeable = False
    return FieldTables(add=add, mul=mul, neg=neg, first_digit=first_digit)


def addition_table(spec: FieldSpec) -> List[List[int]]:
    """Rows of a ⊕ b for a, b in index order."""
    return field_tables(spec).add.tolist()


def multiplication_table(spec: FieldSpec) -> List[List[int]]:
    """Rows of a ⊙ b for a, b in index order."""
    return field_tables(spec).mul.tolist()

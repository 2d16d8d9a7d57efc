"""Unit tests for finite field construction and arithmetic."""

import itertools

import numpy as np
import pytest

from mubqkd_mcp.errors import ErrorCode, FieldError
from mubqkd_mcp.galois_field import (
    MAX_SUPPORTED_ORDER,
    addition_table,
    element,
    elements,
    field_add,
    field_inv,
    field_mul,
    field_neg,
    field_pow,
    field_sub,
    field_tables,
    find_irreducible,
    format_polynomial,
    from_digits,
    is_irreducible,
    is_prime,
    make_field,
    multiplication_table,
)


def oracle_mul(p, irreducible, a_digits, b_digits):
    """Schoolbook product followed by repeated x^m substitution."""
    m = len(irreducible) - 1
    prod = [0] * (2 * m)
    for i, x in enumerate(a_digits):
        for j, y in enumerate(b_digits):
            prod[i + j] += x * y
    for deg in range(2 * m - 1, m - 1, -1):
        coef = prod[deg] % p
        prod[deg] = 0
        for i in range(m):
            prod[deg - m + i] -= coef * irreducible[i]
    return tuple(c % p for c in prod[:m])


class TestIsPrime:
    """Test primality helper."""

    def test_small_values(self):
        """Test primes and composites below 30."""
        assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


class TestMakeField:
    """Test field construction."""

    def test_prime_field(self, gf3):
        """Test GF(3) uses the x convention."""
        assert gf3.d == 3
        assert gf3.irreducible == (0, 1)
        assert str(gf3) == "GF(3^1)"

    def test_gf9_polynomial(self, gf9):
        """Test GF(9) reduces by x^2 + 1."""
        assert gf9.irreducible == (1, 0, 1)
        assert format_polynomial(gf9.irreducible) == "x^2 + 1"

    def test_gf25_polynomial(self):
        """Test GF(25) reduces by x^2 + 2."""
        assert make_field(5, 2).irreducible == (2, 0, 1)

    def test_gf27_polynomial(self):
        """Test GF(27) reduces by x^3 + 2x + 1."""
        spec = make_field(3, 3)
        assert spec.irreducible == (1, 2, 0, 1)
        assert format_polynomial(spec.irreducible) == "x^3 + 2x + 1"

    def test_deterministic(self):
        """Test repeated construction gives the same polynomial."""
        assert make_field(7, 2) == make_field(7, 2)

    def test_even_characteristic(self):
        """Test p = 2 is rejected."""
        with pytest.raises(FieldError) as exc_info:
            make_field(2, 3)
        assert exc_info.value.code == ErrorCode.EVEN_CHARACTERISTIC

    def test_not_prime(self):
        """Test composite characteristic is rejected."""
        with pytest.raises(FieldError) as exc_info:
            make_field(9, 1)
        assert exc_info.value.code == ErrorCode.NOT_PRIME

    def test_invalid_degree(self):
        """Test m = 0 is rejected."""
        with pytest.raises(FieldError) as exc_info:
            make_field(3, 0)
        assert exc_info.value.code == ErrorCode.INVALID_DEGREE


class TestIrreducible:
    """Test irreducible polynomial search."""

    def test_known_reducible(self):
        """Test x^2 + 2 = (x+1)(x+2) over GF(3)."""
        assert not is_irreducible(3, (2, 0, 1))

    def test_known_irreducible(self):
        """Test x^2 + 1 over GF(3)."""
        assert is_irreducible(3, (1, 0, 1))

    @pytest.mark.parametrize("p,m", [(3, 2), (3, 3), (3, 4), (5, 2), (7, 2), (5, 3)])
    def test_search_result_is_irreducible(self, p, m):
        """Test every search result is monic and irreducible."""
        coeffs = find_irreducible(p, m)
        assert len(coeffs) == m + 1
        assert coeffs[-1] == 1
        assert is_irreducible(p, coeffs)

    def test_degree_one_rejected(self):
        """Test the search needs m >= 2."""
        with pytest.raises(FieldError) as exc_info:
            find_irreducible(3, 1)
        assert exc_info.value.code == ErrorCode.INVALID_DEGREE


class TestElementCodec:
    """Test integer/digit encoding."""

    def test_digits_low_first(self, gf9):
        """Test 7 = 1 + 2*3."""
        assert element(gf9, 7).digits == (1, 2)
        assert from_digits(gf9, (1, 2)).index == 7

    def test_out_of_range(self, gf9):
        """Test indices outside [0, d) are rejected."""
        with pytest.raises(FieldError) as exc_info:
            element(gf9, 9)
        assert exc_info.value.code == ErrorCode.ELEMENT_OUT_OF_RANGE

    def test_bad_digits(self, gf9):
        """Test digits must be in [0, p)."""
        with pytest.raises(FieldError):
            from_digits(gf9, (3, 0))

    def test_foreign_element(self, gf3, gf9):
        """Test an element of GF(9) is not accepted by GF(3)."""
        with pytest.raises(FieldError):
            field_add(gf3, element(gf9, 4), element(gf3, 1))


class TestFieldArithmetic:
    """Test field axioms on GF(9) and GF(27)."""

    def test_prime_field_matches_modular(self, gf3):
        """Test GF(3) arithmetic is arithmetic mod 3."""
        for a, b in itertools.product(range(3), repeat=2):
            assert field_add(gf3, element(gf3, a), element(gf3, b)).index == (a + b) % 3
            assert field_mul(gf3, element(gf3, a), element(gf3, b)).index == (a * b) % 3

    def test_additive_inverse(self, gf9):
        """Test a ⊕ (⊖a) = 0."""
        for a in elements(gf9):
            assert field_add(gf9, a, field_neg(gf9, a)).index == 0

    def test_sub_is_add_neg(self, gf9):
        """Test a ⊖ b = a ⊕ (⊖b)."""
        for a, b in itertools.product(elements(gf9), repeat=2):
            assert field_sub(gf9, a, b) == field_add(gf9, a, field_neg(gf9, b))

    def test_commutative_and_distributive(self, gf9):
        """Test commutativity, associativity and distributivity exhaustively."""
        elems = elements(gf9)
        for a, b in itertools.product(elems, repeat=2):
            assert field_mul(gf9, a, b) == field_mul(gf9, b, a)
        for a, b, c in itertools.product(elems, repeat=3):
            left = field_mul(gf9, a, field_add(gf9, b, c))
            right = field_add(gf9, field_mul(gf9, a, b), field_mul(gf9, a, c))
            assert left == right
            assert field_mul(gf9, field_mul(gf9, a, b), c) == field_mul(gf9, a, field_mul(gf9, b, c))

    def test_x_squared(self, gf9):
        """Test x ⊙ x = -1 = 2 in GF(9) with x^2 + 1."""
        x = element(gf9, 3)
        assert field_mul(gf9, x, x).index == 2

    @pytest.mark.parametrize("m", [2, 3])
    def test_matches_oracle(self, m):
        """Test field_mul agrees with an independent polynomial oracle."""
        spec = make_field(3, m)
        for a, b in itertools.product(elements(spec), repeat=2):
            expected = oracle_mul(3, spec.irreducible, a.digits, b.digits)
            assert field_mul(spec, a, b).digits == expected

    def test_inverse(self, gf9):
        """Test a ⊙ a^-1 = 1 for every nonzero a."""
        for a in elements(gf9)[1:]:
            assert field_mul(gf9, a, field_inv(gf9, a)).index == 1

    def test_inverse_of_zero(self, gf9):
        """Test zero has no inverse."""
        with pytest.raises(FieldError) as exc_info:
            field_inv(gf9, element(gf9, 0))
        assert exc_info.value.code == ErrorCode.NO_INVERSE

    def test_group_order(self):
        """Test a^(d-1) = 1 for nonzero a in GF(27)."""
        spec = make_field(3, 3)
        for a in elements(spec)[1:]:
            assert field_pow(spec, a, spec.d - 1).index == 1

    def test_negative_exponent(self, gf9):
        """Test negative exponents are rejected."""
        with pytest.raises(FieldError):
            field_pow(gf9, element(gf9, 2), -1)


class TestFieldTables:
    """Test vectorized lookup tables."""

    def test_tables_match_scalar_ops(self, gf9):
        """Test tables agree with field_add/field_mul."""
        tables = field_tables(gf9)
        for a, b in itertools.product(elements(gf9), repeat=2):
            assert tables.add[a.index, b.index] == field_add(gf9, a, b).index
            assert tables.mul[a.index, b.index] == field_mul(gf9, a, b).index
        assert tables.first_digit.tolist() == [i % 3 for i in range(9)]

    def test_tables_read_only(self, gf9):
        """Test cached tables cannot be mutated."""
        with pytest.raises(ValueError):
            field_tables(gf9).add[0, 0] = 1

    def test_row_lists(self, gf3):
        """Test list renderings."""
        assert addition_table(gf3) == [[0, 1, 2], [1, 2, 0], [2, 0, 1]]
        assert multiplication_table(gf3) == [[0, 0, 0], [0, 1, 2], [0, 2, 1]]


# Every odd prime power up to MAX_SUPPORTED_ORDER
SUPPORTED_FIELDS = [
    (3, 1), (5, 1), (7, 1), (3, 2), (11, 1), (13, 1), (17, 1), (19, 1), (23, 1),
    (5, 2), (3, 3), (29, 1), (31, 1), (37, 1), (41, 1), (43, 1), (47, 1), (7, 2),
]


def test_supported_fields_cover_every_order():
    """Test the parameter list holds each odd prime power once."""
    orders = sorted(q**k for q, k in SUPPORTED_FIELDS)
    assert orders == [n for n in range(3, MAX_SUPPORTED_ORDER + 1) if _is_odd_prime_power(n)]


@pytest.mark.parametrize("p,m", SUPPORTED_FIELDS)
class TestAllSupportedFields:
    """Exhaustive axiom checks over index-level tables."""

    def test_abelian_groups(self, p, m):
        """Test commutativity, associativity, identities and inverses."""
        spec = make_field(p, m)
        tables = field_tables(spec)
        add, mul = tables.add, tables.mul
        idx = np.arange(spec.d)
        for op in (add, mul):
            assert np.array_equal(op, op.T)
            left = op[op[:, :, None], idx[None, None, :]]
            right = op[idx[:, None, None], op[None, :, :]]
            assert np.array_equal(left, right)
        assert np.array_equal(add[0], idx)
        assert np.array_equal(mul[1], idx)
        assert np.all(add[idx, tables.neg] == 0)
        assert np.all(mul[0] == 0)
        # every nonzero row has exactly one 1
        assert np.all((mul[1:, 1:] == 1).sum(axis=1) == 1)

    def test_distributive(self, p, m):
        """Test a(b + c) = ab + ac for all triples."""
        spec = make_field(p, m)
        add, mul = field_tables(spec).add, field_tables(spec).mul
        idx = np.arange(spec.d)
        left = mul[idx[:, None, None], add[None, :, :]]
        right = add[mul[:, :, None], mul[:, None, :]]
        assert np.array_equal(left, right)

    def test_characteristic(self, p, m):
        """Test p-fold sums vanish and no shorter sum of a nonzero element does."""
        spec = make_field(p, m)
        add = field_tables(spec).add
        idx = np.arange(spec.d)
        total = np.zeros(spec.d, dtype=np.int64)
        for step in range(1, p + 1):
            total = add[total, idx]
            if step < p:
                assert np.all(total[1:] != 0)
        assert np.all(total == 0)

    def test_codec_round_trip(self, p, m):
        """Test decode(encode(i)) = i for every index."""
        spec = make_field(p, m)
        seen = set()
        for i in range(spec.d):
            digits = element(spec, i).digits
            assert len(digits) == m
            assert from_digits(spec, digits).index == i
            seen.add(digits)
        assert len(seen) == spec.d

    def test_scalar_inverse(self, p, m):
        """Test field_inv on every nonzero element."""
        spec = make_field(p, m)
        for a in elements(spec)[1:]:
            assert field_mul(spec, a, field_inv(spec, a)).index == 1


def _is_odd_prime_power(n):
    for q in range(3, n + 1, 2):
        if is_prime(q) and n % q == 0:
            while n % q == 0:
                n //= q
            return n == 1
    return False

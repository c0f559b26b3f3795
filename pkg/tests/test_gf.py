import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lrfc_cache.gf import (
    REDUCTION_POLYNOMIALS,
    FieldContext,
    FieldMismatchError,
    add,
    get_field,
    inv,
    mul,
    sample_uniform,
)

ORDERS = [2, 4, 8, 16, 32, 64, 128, 256]


def poly_mulmod(a, b, poly):
    """Reference product: full carry-less product, then long division by ``poly``."""
    prod = 0
    for i in range(b.bit_length()):
        if b >> i & 1:
            prod ^= a << i
    deg = poly.bit_length() - 1
    while prod.bit_length() - 1 >= deg:
        prod ^= poly << (prod.bit_length() - 1 - deg)
    return prod


def test_add_examples():
    f4, f16 = get_field(4), get_field(16)
    assert add(f4(2), f4(2)) == f4(0)
    assert add(f4(3), f4(0)) == f4(3)
    assert add(f16(9), f16(5)) == f16(12)


def test_mul_examples():
    f16 = get_field(16)
    assert mul(f16(8), f16(2)) == f16(3)
    for a in f16.elements():
        assert a * f16.one == a
        assert a * f16.zero == f16.zero


def test_inv_examples():
    assert inv(get_field(4)(2)) == get_field(4)(3)
    assert inv(get_field(2)(1)) == get_field(2)(1)
    for q in ORDERS:
        assert inv(get_field(q).one) == get_field(q).one


def test_inverse_of_zero_raises():
    with pytest.raises(ZeroDivisionError):
        inv(get_field(8).zero)


def test_mismatched_fields():
    with pytest.raises(FieldMismatchError):
        get_field(4)(1) + get_field(8)(1)
    with pytest.raises(FieldMismatchError):
        get_field(4)(1) * get_field(8)(1)


def test_element_range_checked():
    with pytest.raises(ValueError):
        get_field(4)(4)


@pytest.mark.parametrize("q", ORDERS)
def test_tables_match_reference_product(q):
    f = get_field(q)
    poly = REDUCTION_POLYNOMIALS[f.m]
    rows = range(q) if q <= 64 else range(0, q, 7)
    for a in rows:
        for b in range(q):
            expected = poly_mulmod(a, b, poly)
            assert f.mul_table[a, b] == expected
            assert f.mul_via_logs(a, b) == expected


@pytest.mark.parametrize("q", ORDERS)
def test_exp_log_inverse_and_inverse_table(q):
    f = get_field(q)
    nonzero = np.arange(1, q)
    assert np.array_equal(f.exp[f.log[nonzero]], nonzero)
    assert sorted(f.exp[: q - 1].tolist()) == list(range(1, q))
    assert np.all(f.mul_table[nonzero, f.inv_table[nonzero]] == 1)


def test_reducible_polynomial_rejected():
    with pytest.raises(ValueError):
        FieldContext(16, 0b10101)  # (x^2 + x + 1)^2


def test_bad_order_rejected():
    for q in (1, 3, 12, 512):
        with pytest.raises(ValueError):
            get_field(q)


@pytest.mark.parametrize("q", [2, 4, 8, 16])
def test_field_axioms_exhaustive(q):
    els = get_field(q).elements()
    zero, one = els[0], els[1]
    for a, b in itertools.product(els, repeat=2):
        assert a + b == b + a
        assert a * b == b * a
        assert (a + b) * (a + b) == a * a + b * b
    for a, b, c in itertools.product(els, repeat=3):
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
    for a in els:
        assert a + zero == a and a * one == a and a + a == zero
        if a != zero:
            assert a * a.inverse() == one


@given(q=st.sampled_from([32, 64, 128, 256]), data=st.data())
def test_field_axioms_sampled(q, data):
    f = get_field(q)
    a, b, c = (f(data.draw(st.integers(0, q - 1))) for _ in range(3))
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert (a + b) ** 2 == a**2 + b**2
    if a.value:
        assert a * a.inverse() == f.one
        assert (a * b) / a == b


def test_sample_uniform_binary():
    rng = np.random.default_rng(1)
    f = get_field(2)
    draws = f.random(rng, 10**6)
    assert abs(draws.mean() - 0.5) < 0.002
    assert isinstance(sample_uniform(f, rng), type(f.one))


def test_sample_uniform_chi_square_q128():
    from scipy.stats import chi2

    rng = np.random.default_rng(2)
    counts = np.bincount(get_field(128).random(rng, 10**6), minlength=128)
    expected = 10**6 / 128
    stat = ((counts - expected) ** 2 / expected).sum()
    assert stat < chi2.ppf(0.99, df=127)


def test_sample_uniform_replay():
    f = get_field(16)
    r1, r2 = np.random.default_rng(7), np.random.default_rng(7)
    s1 = [sample_uniform(f, r1).value for _ in range(50)]
    s2 = [sample_uniform(f, r2).value for _ in range(50)]
    assert s1 == s2

import cmath
import random

import pytest

from mub_atlas.cyclotomic import (
    SQRT_DIM,
    CycInt,
    OrderMismatch,
    UnsupportedOrder,
    cyc_is_rational,
)


def w(q, k=1):
    return CycInt.root(q, k)


def naive_value(order, coeffs):
    return sum(c * cmath.exp(2j * cmath.pi * k / order) for k, c in enumerate(coeffs))


def random_elements(q, n, seed):
    rng = random.Random(seed)
    return [CycInt(q, [rng.randint(-9, 9) for _ in range(q)]) for _ in range(n)]


def test_add_examples():
    assert w(3) + w(3, 2) == CycInt.integer(3, -1)
    assert w(4) + w(4) == CycInt(4, (0, 2))
    total = CycInt.zero(5)
    for k in range(5):
        total = total + w(5, k)
    assert total == CycInt.zero(5)
    assert total.is_zero()


def test_mul_examples():
    assert w(4) * w(4) == CycInt.integer(4, -1)
    assert w(3) * w(3, 2) == CycInt.one(3)
    assert w(5, 3) * w(5, 4) == w(5, 2)


def test_conj_examples():
    assert w(5).conj() == w(5, 4)
    assert (CycInt.one(4) + w(4)).conj() == CycInt(4, (1, -1))
    assert CycInt.integer(3, -1).conj() == CycInt.integer(3, -1)


def test_is_rational_examples():
    total = CycInt.zero(5)
    for k in range(5):
        total = total + w(5, k)
    assert cyc_is_rational(total) == 0
    assert w(3).is_rational() is None
    # |sum of the numerators of Fourier-5 column 0|^2, oracle: |5|^2 = 25
    col_sum = CycInt.integer(5, 5)
    oracle = abs(5 + 0j) ** 2
    assert oracle == 25.0
    assert (col_sum * col_sum.conj()).is_rational() == 25


def test_is_rational_rejects_unreduced_orders():
    with pytest.raises(UnsupportedOrder):
        CycInt.one(6).is_rational()
    with pytest.raises(UnsupportedOrder):
        CycInt.one(10).is_rational()


def test_embed_examples():
    minus_one = CycInt.integer(2, -1)
    assert minus_one.embed(4) == w(4, 2)
    assert w(5).embed(5) == w(5)
    assert minus_one.embed(10) == w(10, 5)
    with pytest.raises(OrderMismatch):
        w(4).embed(10)


def test_embed_preserves_value():
    rng = random.Random(7)
    for _ in range(50):
        q = rng.choice([2, 3, 4, 5])
        a = CycInt(q, [rng.randint(-9, 9) for _ in range(q)])
        t = q * rng.choice([1, 2, 3])
        b = a.embed(t)
        assert abs(a.to_complex() - b.to_complex()) < 1e-12


def test_canonical_form_is_idempotent():
    rng = random.Random(11)
    for q in (2, 3, 4, 5, 6, 10):
        for _ in range(30):
            coeffs = [rng.randint(-20, 20) for _ in range(q)]
            a = CycInt(q, coeffs)
            b = CycInt(q, a.coeffs)
            assert a.coeffs == b.coeffs


def test_canonical_form_invariants():
    rng = random.Random(13)
    for q in (3, 5):
        for _ in range(30):
            a = CycInt(q, [rng.randint(-20, 20) for _ in range(q)])
            assert a.coeffs[q - 1] == 0
    for _ in range(30):
        a = CycInt(4, [rng.randint(-20, 20) for _ in range(4)])
        assert a.coeffs[2] == 0 and a.coeffs[3] == 0


def test_reduction_preserves_numeric_value():
    rng = random.Random(17)
    for q in (2, 3, 4, 5, 6, 10):
        for _ in range(30):
            coeffs = [rng.randint(-20, 20) for _ in range(q)]
            a = CycInt(q, coeffs)
            assert abs(a.to_complex() - naive_value(q, coeffs)) < 1e-12


def test_ring_axioms_on_random_instances():
    for q in (2, 3, 4, 5):
        xs = random_elements(q, 12, seed=q)
        for a, b, c in zip(xs, xs[4:], xs[8:]):
            assert (a + b) + c == a + (b + c)
            assert a + b == b + a
            assert (a * b) * c == a * (b * c)
            assert a * b == b * a
            assert a * (b + c) == a * b + a * c
            assert a + CycInt.zero(q) == a
            assert a * CycInt.one(q) == a
            assert a - a == CycInt.zero(q)


def test_conj_is_involutive_and_multiplicative():
    for q in (2, 3, 4, 5):
        xs = random_elements(q, 10, seed=100 + q)
        for a, b in zip(xs, xs[5:]):
            assert a.conj().conj() == a
            assert (a * b).conj() == a.conj() * b.conj()
            norm = (a * a.conj()).is_rational()
            if norm is not None:
                assert norm >= 0


def test_arithmetic_agrees_with_floats():
    for q in (2, 3, 4, 5):
        xs = random_elements(q, 10, seed=200 + q)
        for a, b in zip(xs, xs[5:]):
            assert abs((a + b).to_complex() - (a.to_complex() + b.to_complex())) < 1e-12
            prod = (a * b).to_complex()
            assert abs(prod - a.to_complex() * b.to_complex()) < 1e-9
            assert abs(a.conj().to_complex() - a.to_complex().conjugate()) < 1e-12


def test_mixed_order_arithmetic_is_rejected():
    with pytest.raises(OrderMismatch):
        w(3) + w(5)
    with pytest.raises(OrderMismatch):
        w(4) * w(5)


def test_int_promotion():
    assert w(5) * 2 == CycInt(5, (0, 2))
    assert 1 + w(4, 2) == CycInt.zero(4)
    assert w(3) - 1 == CycInt(3, (-1, 1))


def test_sqrt_dim_table():
    for d, elem in SQRT_DIM.items():
        assert abs(elem.to_complex() - d**0.5) < 1e-12
        assert (elem * elem).is_rational() == d

"""Tests for the BCH machinery.

The decisive check is the exponential identity itself: the computed series,
re-expanded into the truncated associative algebra, must satisfy
exp(Z) = exp(X) exp(T) with exact rational arithmetic.  The textbook
low-degree coefficients are asserted separately to pin the orientation
conventions."""

import random
from fractions import Fraction

import pytest

from engelkit import _bch, hall_lie
from engelkit._bch import (
    bch_combine,
    conjugate_log,
    fneg,
    generator_logs,
    log_pc_word,
    peel_to_exponents,
    universal_bch,
)


def test_universal_series_low_degree_coefficients():
    uni = hall_lie.get_basis(2, 6)
    series = universal_bch()
    by_label = {w.label(("X", "T")): i for i, w in enumerate(uni.words)}
    assert series[by_label["X"]] == 1
    assert series[by_label["T"]] == 1
    assert series[by_label["[T,X]"]] == Fraction(-1, 2)
    assert series[by_label["[[T,X],X]"]] == Fraction(1, 12)
    assert series[by_label["[[T,X],T]"]] == Fraction(-1, 12)


def _lie_to_assoc(uni, idx):
    w = uni.words[idx]
    if w.generator is not None:
        return {(w.generator - 1,): Fraction(1)}
    a = _lie_to_assoc(uni, w.left.index)
    b = _lie_to_assoc(uni, w.right.index)
    out = dict(_bch._amul(a, b, 6))
    return _bch.fadd(out, _bch._amul(b, a, 6), -1)


def test_universal_series_satisfies_exponential_identity():
    uni = hall_lie.get_basis(2, 6)
    z_assoc: dict = {}
    for idx, c in universal_bch().items():
        _bch.fadd(z_assoc, _lie_to_assoc(uni, idx), c)
    lhs = _bch._aexp(z_assoc, 6)
    rhs = _bch._amul(_bch._aexp({(0,): Fraction(1)}, 6),
                     _bch._aexp({(1,): Fraction(1)}, 6), 6)
    assert lhs == rhs


def _rand_vec(basis, rng, density=0.4, bound=3):
    out = {}
    for i in range(len(basis.words)):
        if rng.random() < density:
            c = rng.randint(-bound, bound)
            if c:
                out[i] = Fraction(c)
    return out


def test_bch_with_inverse_cancels():
    basis = hall_lie.get_basis(2, 5)
    rng = random.Random(7)
    for _ in range(10):
        a = _rand_vec(basis, rng)
        assert bch_combine(basis, a, fneg(a)) == {}
        assert bch_combine(basis, fneg(a), a) == {}


def test_bch_is_associative():
    for rank, cap in ((2, 5), (3, 4)):
        basis = hall_lie.get_basis(rank, cap)
        rng = random.Random(rank * 100 + cap)
        for _ in range(6):
            a, b, c = (_rand_vec(basis, rng, 0.3) for _ in range(3))
            left = bch_combine(basis, bch_combine(basis, a, b), c)
            right = bch_combine(basis, a, bch_combine(basis, b, c))
            assert left == right


def test_generator_logs_are_triangular_and_collect_to_themselves():
    for rank, cap in ((2, 4), (3, 3)):
        basis = hall_lie.get_basis(rank, cap)
        logs = generator_logs(basis)
        for i, w in enumerate(basis.words):
            assert logs[i].get(i) == 1
            for k in logs[i]:
                assert basis.words[k].weight >= w.weight
                if basis.words[k].weight == w.weight:
                    assert k == i
            assert peel_to_exponents(basis, logs[i]) == {i: 1}


def test_class_two_commutator_log_is_exact():
    basis = hall_lie.get_basis(2, 2)
    logs = generator_logs(basis)
    assert logs[2] == {2: Fraction(1)}


def test_class_two_conjugation_produces_central_tail():
    basis = hall_lie.get_basis(2, 2)
    for eps in (1, -1):
        w = conjugate_log(basis, 0, 1, eps)
        assert peel_to_exponents(basis, w) == {1: 1, 2: eps}


def test_log_and_peel_are_mutually_inverse():
    for rank, cap in ((2, 4), (3, 3)):
        basis = hall_lie.get_basis(rank, cap)
        rng = random.Random(13)
        for _ in range(8):
            exps = {}
            for i in range(len(basis.words)):
                if rng.random() < 0.5:
                    c = rng.randint(-4, 4)
                    if c:
                        exps[i] = c
            assert peel_to_exponents(basis, log_pc_word(basis, exps)) == exps


def test_peel_rejects_non_integer_coordinates():
    basis = hall_lie.get_basis(2, 3)
    with pytest.raises(ArithmeticError):
        peel_to_exponents(basis, {0: Fraction(1, 2)})

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from belyi_geodesics.exhaustive import word_matrices
from belyi_geodesics.stern import (
    CORRELATION_LIMIT,
    KEYS,
    MomentVector,
    covariance_closed_form,
    covariance_sign_change,
    diag_product_closed_form,
    diag_product_sum,
    diagonal_correlation,
    entry_mean,
    moment_table,
    moment_vector,
    moment_vector_step,
    power_sum_closed_form,
    power_sum_three_term,
    power_sums,
    stern_row,
    trace_covariance,
    trace_mean,
    trace_variance,
    trace_variance_closed_form,
)


def naive_row(i, a=1, b=0):
    row = [a, b]
    for _ in range(i):
        out = []
        for x, y in zip(row, row[1:]):
            out += [x, x + y]
        row = out + [row[-1]]
    return row


def exhaustive_sums(i):
    """All 14 monomial sums straight from the word products."""
    a, b, c, d = (x.astype(object) for x in word_matrices(i))
    cols = dict(zip("abcd", (a, b, c, d)))
    return {k: int(np.sum(cols[k[0]] * cols[k[1]]) if len(k) == 2 else np.sum(cols[k])) for k in KEYS}


@pytest.mark.parametrize(
    "i, expected",
    [(0, [1, 0]), (2, [1, 2, 1, 1, 0]), (3, [1, 3, 2, 3, 1, 2, 1, 1, 0])],
)
def test_rows(i, expected):
    assert stern_row(i).values.tolist() == expected


def test_row_matches_naive_and_reflects():
    for i in range(12):
        r = stern_row(i).values.tolist()
        assert r == naive_row(i)
        assert stern_row(i, (0, 1)).values.tolist() == r[::-1]


def test_row_coprime_neighbours():
    r = stern_row(14).values.tolist()
    assert all(math.gcd(x, y) == 1 for x, y in zip(r, r[1:]))


def test_row_sums():
    for i in range(26):
        assert int(stern_row(i).trimmed().sum()) == (3**i + 1) // 2


def test_row_cap():
    with pytest.raises(ValueError):
        stern_row(31)


def test_top_rows_are_stern_pairs():
    for i in range(1, 12):
        a, b, _, _ = word_matrices(i)
        r = stern_row(i).values
        pairs = sorted(zip(r[:-1].tolist(), r[1:].tolist()))
        assert sorted(zip(a.tolist(), b.tolist())) == pairs


def test_means():
    assert entry_mean(1) == 1
    assert entry_mean(2) == Fraction(5, 4)
    assert entry_mean(10) == Fraction(59050, 2048)
    assert [trace_mean(i) for i in (1, 2, 3)] == [2, Fraction(5, 2), Fraction(7, 2)]
    for i in range(1, 16):
        row = stern_row(i).trimmed()
        assert Fraction(int(row.sum()), len(row)) == entry_mean(i)
        a, _, _, d = word_matrices(i)
        assert Fraction(int((a + d).sum()), 2**i) == trace_mean(i)


def test_power_sums_initial_values():
    assert [power_sums(i)[0] for i in (1, 2, 3)] == [2, 7, 30]
    assert sum(x * x for x in naive_row(3)[:-1]) == 30
    for i in range(1, 16):
        r = naive_row(i)[:-1]
        A = sum(x * x for x in r)
        B = sum(x * y for x, y in zip(r, r[1:]))
        assert power_sums(i) == (A, B)


def test_printed_constant_does_not_fit():
    # with -2 in place of -1 the second value would be 6, not 7
    A, B = 2, 1
    assert 3 * A + 2 * B - 2 == 6
    assert power_sums(2)[0] == 7


def test_recurrences_and_closed_form_agree():
    for i in range(1, 41):
        A, _ = power_sums(i)
        assert power_sum_three_term(i) == A
        if i >= 3:
            assert power_sum_closed_form(i) == pytest.approx(A, rel=1e-9)


def test_diag_products():
    assert [diag_product_sum(i) for i in (1, 2, 3)] == [2, 6, 22]
    a, _, _, d = word_matrices(3)
    assert sorted((a * d).tolist()) == [1, 1, 3, 3, 3, 3, 4, 4]
    assert diag_product_closed_form(3) == pytest.approx(22, rel=1e-9)
    for i in range(1, 41):
        assert diag_product_closed_form(i) == pytest.approx(diag_product_sum(i), rel=1e-9)


def test_printed_c_recurrence_is_inconsistent():
    C2 = 6
    assert 5 * C2 + 2 * C2 - 2 ** (2 - 1) == 40
    assert diag_product_sum(3) == 22


def test_small_variances():
    assert trace_covariance(1) == 0 and trace_variance(1) == 0
    assert trace_variance(2) == Fraction(1, 4)


def test_closed_forms_match_exact():
    for i in range(1, 41):
        assert covariance_closed_form(i) == pytest.approx(float(trace_covariance(i)), rel=1e-9, abs=1e-12)
        assert trace_variance_closed_form(i) == pytest.approx(float(trace_variance(i)), rel=1e-9, abs=1e-12)


def test_moment_engine_identity_and_steps():
    v = MomentVector.identity()
    assert v["a"] + v["d"] == 2
    v1 = moment_vector_step(v)
    assert v1["a"] + v1["d"] == 4
    assert moment_vector_step(v1)["ad"] == 6


@pytest.mark.parametrize("i", range(0, 15))
def test_moment_engine_matches_exhaustive(i):
    assert moment_vector(i).as_dict() == exhaustive_sums(i)


def test_exhaustive_moments_match_exactly():
    for i in range(1, 15):
        a, _, _, d = (x.astype(object) for x in word_matrices(i))
        n = 2**i
        tr = a + d
        mean = Fraction(int(tr.sum()), n)
        var = Fraction(int((tr * tr).sum()), n) - mean**2
        cov = Fraction(int((a * d).sum()), n) - Fraction(int(a.sum()), n) * Fraction(int(d.sum()), n)
        assert mean == trace_mean(i)
        assert var == trace_variance(i)
        assert cov == trace_covariance(i)


def test_covariance_sign_change():
    k = covariance_sign_change()
    assert k == 21
    assert all(trace_covariance(i) < 0 for i in range(2, k))
    assert all(trace_covariance(i) > 0 for i in range(k, 60))


def test_correlation_limit():
    assert CORRELATION_LIMIT == pytest.approx(0.6096118, abs=1e-7)
    # exact value at 30 is far from the limit; convergence is slow
    assert diagonal_correlation(30) == pytest.approx(0.15971711, abs=1e-8)
    assert abs(diagonal_correlation(1000) - CORRELATION_LIMIT) < 1e-3


def test_correlation_against_numpy():
    a, _, _, d = word_matrices(20)
    r = np.corrcoef(a.astype(float), d.astype(float))[0, 1]
    assert diagonal_correlation(20) == pytest.approx(r, abs=1e-9)


@given(st.integers(1, 200))
def test_diagonals_share_distribution(i):
    v = moment_vector(i)
    assert v["a"] == v["d"] and v["aa"] == v["dd"]


def test_moment_table():
    rows = moment_table(3)
    assert [r["step"] for r in rows] == [1, 2, 3]
    assert rows[2]["trace_mean"] == 3.5
    assert set(rows[0]) >= {"mean", "trace_variance", "covariance", "correlation"}

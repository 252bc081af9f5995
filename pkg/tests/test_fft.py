import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import rel_l2
from nmfft.fft import (
    FFTDomainError,
    FFTLengthError,
    dft_oracle,
    fft1d,
    flop_count_fft,
)


def cvec(rng, n):
    return (rng.standard_normal(n) + 1j * rng.standard_normal(n)).astype(np.complex64)


def test_impulse_to_constant():
    np.testing.assert_array_equal(fft1d([1, 0, 0, 0]), np.ones(4, np.complex64))


def test_constant_to_scaled_impulse():
    np.testing.assert_allclose(fft1d([1, 1, 1, 1]), [4, 0, 0, 0], atol=1e-6)


def test_oracle_len_one_identity():
    np.testing.assert_array_equal(dft_oracle([2 - 3j]), [2 - 3j])


def test_oracle_unit_shift():
    np.testing.assert_allclose(dft_oracle([0, 1, 0, 0]), [1, -1j, -1, 1j], atol=1e-12)


def test_oracle_inverse_normalised():
    x = np.array([1, 2j, -3, 0.5])
    np.testing.assert_allclose(dft_oracle(dft_oracle(x), "inverse"), x, atol=1e-12)


def test_oracle_any_length():
    # n = 3: X[1] = 1 + w + w^2 with w = exp(-2 pi i/3) sums to 0
    np.testing.assert_allclose(dft_oracle([1, 1, 1]), [3, 0, 0], atol=1e-12)


def test_random_1024_matches_oracle(rng):
    x = cvec(rng, 1024)
    assert rel_l2(fft1d(x), dft_oracle(x)) < 1e-4


@pytest.mark.parametrize("n", [2 ** p for p in range(1, 13)])
def test_oracle_equivalence_all_lengths(rng, n):
    x = cvec(rng, n)
    assert rel_l2(fft1d(x), dft_oracle(x)) < 1e-4
    assert rel_l2(fft1d(x, "inverse"), dft_oracle(x, "inverse")) < 1e-4


def test_batched_rows_match_single(rng):
    x = cvec(rng, 3 * 64).reshape(3, 64)
    out = fft1d(x)
    for r in range(3):
        np.testing.assert_array_equal(out[r], fft1d(x[r]))


def test_output_dtype(rng):
    assert fft1d(cvec(rng, 8)).dtype == np.complex64


@pytest.mark.parametrize("n", [0, 3, 6, 12, 1000])
def test_non_power_of_two_rejected(n):
    with pytest.raises(FFTLengthError):
        fft1d(np.zeros(n, np.complex64))


@pytest.mark.parametrize("bad", [np.nan, np.inf, -np.inf])
def test_non_finite_rejected(bad):
    x = np.zeros(8, np.complex64)
    x[3] = bad
    with pytest.raises(FFTDomainError):
        fft1d(x)
    with pytest.raises(FFTDomainError):
        dft_oracle(x)


def test_flop_count():
    assert flop_count_fft(4096) == 245760
    assert flop_count_fft(2) == 10
    n = 4096
    assert 2 * n * flop_count_fft(n) == 10 * n * n * 12 == 2013265920
    with pytest.raises(FFTLengthError):
        flop_count_fft(12)


lengths = st.sampled_from([2 ** p for p in range(0, 13)])


@st.composite
def vectors(draw):
    n = draw(lengths)
    seed = draw(st.integers(0, 2 ** 32 - 1))
    return cvec(np.random.default_rng(seed), n)


@settings(max_examples=60, deadline=None)
@given(vectors())
def test_round_trip(x):
    assert rel_l2(fft1d(fft1d(x), "inverse"), x) < 1e-5


@settings(max_examples=60, deadline=None)
@given(vectors())
def test_parseval(x):
    X = fft1d(x).astype(np.complex128)
    lhs = np.sum(np.abs(x.astype(np.complex128)) ** 2)
    rhs = np.sum(np.abs(X) ** 2) / len(x)
    assert abs(lhs - rhs) / lhs < 1e-4


@settings(max_examples=40, deadline=None)
@given(vectors(), st.integers(0, 2 ** 32 - 1),
       st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
       st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False))
def test_linearity(x, seed, a, b):
    y = cvec(np.random.default_rng(seed), len(x))
    lhs = fft1d((a * x + b * y).astype(np.complex64))
    rhs = a * fft1d(x).astype(np.complex128) + b * fft1d(y).astype(np.complex128)
    if np.linalg.norm(rhs) > 1e-3:
        assert rel_l2(lhs, rhs) < 1e-4

import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from freelab.freemoments import (
    MomentSequence,
    NoncommPolynomial,
    alternating_word,
    bernoulli_moments,
    cumulants_to_moments,
    cumulants_to_moments_enumerated,
    free_additive_convolution,
    free_multiplicative_convolution,
    free_poly_moment,
    free_word_moment,
    genus_zero_moment,
    moments_to_cumulants,
    mp_moments,
    point_moments,
    semicircle_moments,
    uniform_moments,
)
from freelab.ncpart import catalan

F = Fraction


def mp_moment_by_quadrature(lam, n):
    lo, hi = (1 - math.sqrt(lam)) ** 2, (1 + math.sqrt(lam)) ** 2

    def f(x):
        return x**n * math.sqrt(max((hi - x) * (x - lo), 0.0)) / (2 * math.pi * lam * x)

    val, _ = integrate.quad(f, lo, hi, epsabs=1e-12, epsrel=1e-12, limit=200)
    # The atom at 0 contributes nothing to moments of order >= 1.
    return val


def narayana_mp_moment(lam, n):
    return sum(math.comb(n, k) * math.comb(n, k - 1) * lam ** (k - 1) for k in range(1, n + 1)) / n


def test_point_mass_cumulants():
    c = F(3, 2)
    assert moments_to_cumulants(point_moments(c, 6)).values == (c, 0, 0, 0, 0, 0)


def test_bernoulli_cumulants():
    assert moments_to_cumulants([0, 1, 0, 1]).values == (0, 1, 0, -1)


def test_all_ones_cumulants_round_trip():
    m = cumulants_to_moments([1, 1, 1])
    assert m.values == (1, 2, 5)
    assert moments_to_cumulants(m).values == (1, 1, 1)


@pytest.mark.parametrize(
    "kappa, moments",
    [((0, 1, 0, 0), (0, 1, 0, 2)), ((1, 0, 0, 0), (1, 1, 1, 1)), ((0, 0, 0), (0, 0, 0))],
)
def test_cumulants_to_moments_examples(kappa, moments):
    assert cumulants_to_moments(kappa).values == moments


@pytest.mark.parametrize("K", [1, 4, 8, 10])
def test_recursion_matches_enumeration(K):
    rnd = random.Random(K)
    kappa = [F(rnd.randint(-5, 5), rnd.randint(1, 4)) for _ in range(K)]
    assert list(cumulants_to_moments(kappa).values) == cumulants_to_moments_enumerated(kappa)


def random_measure_moments(rng, K):
    n = int(rng.integers(1, 8))
    x, w = rng.uniform(-2, 2, n), rng.dirichlet(np.ones(n))
    return [float(np.dot(w, x**j)) for j in range(1, K + 1)]


def test_round_trip_random_sequences():
    rng = np.random.default_rng(2024)
    for _ in range(100):
        m = random_measure_moments(rng, int(rng.integers(1, 11)))
        back = cumulants_to_moments(moments_to_cumulants(m)).values
        for a, b in zip(back, m):
            assert abs(a - b) <= 1e-12 * abs(b)


@given(st.lists(st.fractions(min_value=-4, max_value=4, max_denominator=6), min_size=1, max_size=8))
@settings(max_examples=60, deadline=None)
def test_round_trip_exact(kappa):
    assert list(moments_to_cumulants(cumulants_to_moments(kappa)).values) == kappa


def test_cap():
    with pytest.raises(ValueError):
        cumulants_to_moments([0] * 25)


@pytest.mark.parametrize("lam", [0.25, 0.5, 1, 2, 4])
def test_mp_moments_against_quadrature(lam):
    m = mp_moments(lam, 6)
    for n in range(1, 7):
        assert abs(m[n] - mp_moment_by_quadrature(lam, n)) <= 1e-6
        assert m[n] == pytest.approx(narayana_mp_moment(lam, n), rel=1e-12)


def test_mp_moment_examples():
    assert mp_moments(F(1, 2), 4).values == (1, F(3, 2), F(11, 4), F(45, 8))
    assert mp_moments(1, 2).values == (1, 2)
    with pytest.raises(ValueError):
        mp_moments(0, 3)


def test_semicircle_moments():
    m = semicircle_moments(10)
    assert m[2] == 1 and m[4] == 2 and m[3] == 0
    assert m.values == cumulants_to_moments([0, 1] + [0] * 8).values
    assert all(m[2 * j] == catalan(j) for j in range(1, 6))


def test_uniform_moments():
    m = uniform_moments(F(0), F(1), 4)
    assert m.values == (F(1, 2), F(1, 3), F(1, 4), F(1, 5))


def test_word_moment_examples():
    mw, my = mp_moments(F(1, 2), 8), uniform_moments(F(0), F(1), 8)
    assert free_word_moment("WY", mw, my) == mw[1] * my[1]
    assert free_word_moment("WWW", mw, my) == mw[3]
    assert free_word_moment("", mw, my) == 1
    assert free_word_moment("WYWY", mw, bernoulli_moments(4)) == 1


def freeness_wywy(mw, my):
    return mw[2] * my[1] ** 2 + mw[1] ** 2 * my[2] - mw[1] ** 2 * my[1] ** 2


@pytest.mark.parametrize("lam", [F(1, 2), F(1), F(3)])
def test_wywy_freeness_identity(lam):
    mw, my = mp_moments(lam, 4), uniform_moments(F(-1), F(2), 4)
    assert free_word_moment("WYWY", mw, my) == freeness_wywy(mw, my)


def all_words(max_len):
    for L in range(1, max_len + 1):
        for bits in range(2**L):
            yield "".join("W" if (bits >> i) & 1 else "Y" for i in range(L))


def test_dp_matches_enumeration():
    mw, my = mp_moments(F(2), 8), uniform_moments(F(-1), F(3), 8)
    for word in all_words(8):
        assert free_word_moment(word, mw, my) == free_word_moment(word, mw, my, method="enumerate")


def test_long_word_within_cap():
    mw, my = mp_moments(0.5, 16), bernoulli_moments(16)
    assert math.isfinite(free_word_moment("WY" * 8, mw, my))
    with pytest.raises(ValueError):
        free_word_moment("W" * 25, mp_moments(1, 25), my)


def test_insufficient_order():
    with pytest.raises(ValueError):
        free_word_moment("WWW", mp_moments(1, 2), bernoulli_moments(2))


@given(st.text(alphabet="WY", min_size=1, max_size=10))
@settings(max_examples=80, deadline=None)
def test_degenerate_y_reduction(word):
    mw = mp_moments(F(3, 4), 10)
    assert free_word_moment(word, mw, point_moments(1, 10)) == mw[word.count("W")]


@given(st.text(alphabet="WY", min_size=1, max_size=9), st.integers(0, 8))
@settings(max_examples=60, deadline=None)
def test_traciality(word, shift):
    mw, my = mp_moments(F(1, 2), 9), uniform_moments(F(0), F(2), 9)
    s = shift % len(word)
    assert free_word_moment(word, mw, my) == free_word_moment(word[s:] + word[:s], mw, my)


def test_poly_moment_examples():
    mw, my = mp_moments(F(1, 2), 4), uniform_moments(F(0), F(1), 4)
    p = NoncommPolynomial.parse("2*W + 3*Y")
    assert free_poly_moment(p, mw, my) == 2 * mw[1] + 3 * my[1]
    assert free_poly_moment(NoncommPolynomial.parse("WY - YW"), mw, my) == 0
    assert free_poly_moment(NoncommPolynomial.constant(F(7, 3)), mw, my) == F(7, 3)


@pytest.mark.parametrize(
    "text, terms",
    [
        ("WYWY", {"WYWY": 1}),
        ("2*WY - YW + 0.5", {"WY": 2, "YW": -1, "": 0.5}),
        ("W + W", {"W": 2}),
        ("(1+2j)*W", {"W": 1 + 2j}),
        ("1e-3*Y", {"Y": 1e-3}),
    ],
)
def test_polynomial_parse(text, terms):
    assert NoncommPolynomial.parse(text).terms == terms


@pytest.mark.parametrize("bad", ["", "WZ", "2**W"])
def test_polynomial_parse_errors(bad):
    with pytest.raises(ValueError):
        NoncommPolynomial.parse(bad)


def test_polynomial_algebra():
    x, y = NoncommPolynomial.word("W"), NoncommPolynomial.word("Y")
    assert ((x + y) ** 2).terms == {"WW": 1, "WY": 1, "YW": 1, "YY": 1}
    assert (x * y - y * x).degree == 2
    assert (x - x).terms == {}
    assert NoncommPolynomial.parse(str(NoncommPolynomial.parse("2*WY - YW + 0.5"))) == NoncommPolynomial.parse(
        "2*WY - YW + 0.5"
    )
    assert NoncommPolynomial.alternating([2, 0]).terms == {"WWYY": 1}


Y_SOURCES = {
    "bernoulli": bernoulli_moments(12),
    "point1": point_moments(F(1), 12),
    "uniform": uniform_moments(F(0), F(1), 12),
}


@pytest.mark.parametrize("lam", [F(1, 2), F(1), F(2)])
@pytest.mark.parametrize("yname", sorted(Y_SOURCES))
def test_genus_zero_matches_nc_engine(lam, yname):
    mw, my = mp_moments(lam, 12), Y_SOURCES[yname]
    for n in range(1, 5):
        for k in np.ndindex(*(4,) * n):
            k = [int(v) for v in k]
            a = genus_zero_moment(k, mw, my)
            b = free_word_moment(alternating_word(k), mw, my)
            assert a == b


def test_genus_zero_examples():
    mw, my = mp_moments(F(1, 2), 4), bernoulli_moments(4)
    assert genus_zero_moment([1], mw, my) == mw[1] * my[1]
    assert genus_zero_moment([1, 1], mw, my) == 1
    mu = uniform_moments(F(0), F(1), 4)
    assert genus_zero_moment([0, 1], mw, mu) == mw[1] * mu[2]


def test_additive_convolution_examples():
    sc = semicircle_moments(6)
    assert free_additive_convolution(sc, sc)[2] == 2
    a, b = F(2), F(-5, 3)
    m = free_additive_convolution(point_moments(a, 4), point_moments(b, 4))
    assert m.values == point_moments(a + b, 4).values
    assert free_additive_convolution(mp_moments(1, 4), mp_moments(1, 4))[2] == 6


def random_sequence(seed, K=6):
    rnd = random.Random(seed)
    return MomentSequence([F(rnd.randint(-6, 6), rnd.randint(1, 5)) for _ in range(K)])


@pytest.mark.parametrize("seed", range(5))
def test_additive_convolution_algebra(seed):
    a, b, c = random_sequence(seed), random_sequence(seed + 10), random_sequence(seed + 20)
    add = free_additive_convolution
    assert add(a, b) == add(b, a)
    assert add(add(a, b), c) == add(a, add(b, c))
    assert add(a, point_moments(F(0), 6)) == a


@pytest.mark.parametrize("seed", range(5))
def test_multiplicative_identity_and_scaling(seed):
    a = random_sequence(seed)
    assert free_multiplicative_convolution(a, point_moments(F(1), 6)) == a
    assert free_multiplicative_convolution(point_moments(F(1), 6), a) == a
    c = F(-3, 2)
    scaled = free_multiplicative_convolution(point_moments(c, 6), a)
    assert scaled.values == tuple(c**n * a[n] for n in range(1, 7))


def test_multiplicative_second_moment():
    a, b = mp_moments(F(1, 2), 4), uniform_moments(F(0), F(1), 4)
    m = free_multiplicative_convolution(a, b)
    assert m[1] == a[1] * b[1]
    assert m[2] == freeness_wywy(a, b)

"""Moment-level free probability.

Distributions are truncated moment sequences ``m_1..m_K``. Arithmetic is
generic, so int/Fraction inputs give exact results and floats give floats.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .ncpart import catalan, enumerate_nc, is_monochromatic
from .perm import compose, cycle_type, cycles, enumerate_sn, full_cycle, inverse
from .weingarten import asymptotic_phi, genus

# The interval recursion and the word DP are polynomial in the order, so the
# moment engine can go beyond the NC enumeration cap.
MOMENT_CAP = 24
LETTERS = ("W", "Y")


@dataclass(frozen=True)
class MomentSequence:
    """Moments ``m_1..m_K``; ``seq[0]`` is the total mass 1."""

    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        if not self.values:
            raise ValueError("empty moment sequence")

    @property
    def K(self) -> int:
        return len(self.values)

    def __len__(self):
        return len(self.values)

    def __getitem__(self, j: int):
        if j == 0:
            return 1
        if not 1 <= j <= len(self.values):
            raise IndexError(f"moment order {j} not available (K={len(self.values)})")
        return self.values[j - 1]

    def truncate(self, K: int) -> "MomentSequence":
        if K > self.K:
            raise ValueError(f"cannot extend K={self.K} to {K}")
        return MomentSequence(self.values[:K])

    def to_list(self) -> list:
        return list(self.values)


@dataclass(frozen=True)
class CumulantSequence:
    """Free cumulants ``k_1..k_K``."""

    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))

    @property
    def K(self) -> int:
        return len(self.values)

    def __len__(self):
        return len(self.values)

    def __getitem__(self, j: int):
        if not 1 <= j <= len(self.values):
            raise IndexError(f"cumulant order {j} not available (K={len(self.values)})")
        return self.values[j - 1]

    def to_list(self) -> list:
        return list(self.values)


def _check_order(K: int, cap: int):
    if K > cap:
        raise ValueError(f"order {K} exceeds cap {cap}")


def _power_coeff(m: Sequence, s: int, r: int):
    # Coefficient of z^r in (m_0 + m_1 z + ... + m_r z^r)^s.
    poly = list(m[: r + 1])
    acc = [1] + [0] * r
    for _ in range(s):
        acc = [sum(acc[i] * poly[d - i] for i in range(d + 1)) for d in range(r + 1)]
    return acc[r]


def cumulants_to_moments(kappa: CumulantSequence | Sequence, cap: int = MOMENT_CAP) -> MomentSequence:
    """Moments from free cumulants, ``m_n = sum_{pi in NC(n)} prod_V k_|V|``.

    Summed by the block containing 1: a block of size s leaves s gaps that are
    filled independently, so
    ``m_n = sum_s k_s * [z^(n-s)] (sum_i m_i z^i)^s``.
    """
    kappa = kappa.values if isinstance(kappa, CumulantSequence) else tuple(kappa)
    _check_order(len(kappa), cap)
    m = [1]
    for n in range(1, len(kappa) + 1):
        m.append(sum(kappa[s - 1] * _power_coeff(m, s, n - s) for s in range(1, n + 1)))
    return MomentSequence(m[1:])


def moments_to_cumulants(m: MomentSequence | Sequence, cap: int = MOMENT_CAP) -> CumulantSequence:
    """Inverse of :func:`cumulants_to_moments`."""
    vals = m.values if isinstance(m, MomentSequence) else tuple(m)
    _check_order(len(vals), cap)
    full = [1, *vals]
    kappa = []
    for n in range(1, len(vals) + 1):
        rest = sum(kappa[s - 1] * _power_coeff(full, s, n - s) for s in range(1, n))
        kappa.append(full[n] - rest)
    return CumulantSequence(kappa)


def cumulants_to_moments_enumerated(kappa: Sequence, cap: int = 12) -> list:
    """Same map as :func:`cumulants_to_moments`, by brute NC(n) enumeration."""
    out = []
    for n in range(1, len(kappa) + 1):
        total = 0
        for p in enumerate_nc(n, cap=cap):
            term = 1
            for size in p.block_sizes():
                term = term * kappa[size - 1]
            total = total + term
        out.append(total)
    return out


# -- moment sources ---------------------------------------------------------


def mp_moments(lam, K: int) -> MomentSequence:
    """Marchenko-Pastur moments for aspect ratio ``lam``; free cumulants are
    ``lam**(n-1)``."""
    if not lam > 0:
        raise ValueError(f"aspect ratio must be positive, got {lam!r}")
    return cumulants_to_moments([lam ** (n - 1) for n in range(1, K + 1)])


def semicircle_moments(K: int) -> MomentSequence:
    """Unit-variance semicircle: even moments are Catalan numbers."""
    return MomentSequence([catalan(j // 2) if j % 2 == 0 else 0 for j in range(1, K + 1)])


def point_moments(c, K: int) -> MomentSequence:
    return MomentSequence([c**j for j in range(1, K + 1)])


def bernoulli_moments(K: int) -> MomentSequence:
    """Symmetric +-1 law."""
    return MomentSequence([1 if j % 2 == 0 else 0 for j in range(1, K + 1)])


def uniform_moments(a, b, K: int) -> MomentSequence:
    if not b > a:
        raise ValueError("need a < b")
    return MomentSequence([(b ** (j + 1) - a ** (j + 1)) / ((j + 1) * (b - a)) for j in range(1, K + 1)])


# -- words and polynomials ---------------------------------------------------


def check_word(word: str) -> str:
    if any(ch not in LETTERS for ch in word):
        raise ValueError(f"word {word!r} must use letters W and Y only")
    return word


def alternating_word(k: Sequence[int]) -> str:
    """``W^{k_1} Y W^{k_2} Y ... W^{k_n} Y``."""
    return "".join("W" * ki + "Y" for ki in k)


@dataclass(frozen=True)
class NoncommPolynomial:
    """Complex-coefficient polynomial in the noncommuting letters W and Y.

    ``terms`` maps words to coefficients; the empty word is the constant term.
    """

    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        merged: dict[str, complex] = {}
        for word, coef in dict(self.terms).items():
            check_word(word)
            merged[word] = merged.get(word, 0) + coef
        object.__setattr__(self, "terms", {w: c for w, c in sorted(merged.items()) if c != 0})

    @classmethod
    def word(cls, word: str, coef=1) -> "NoncommPolynomial":
        return cls({word: coef})

    @classmethod
    def constant(cls, c) -> "NoncommPolynomial":
        return cls({"": c})

    @classmethod
    def alternating(cls, k: Sequence[int]) -> "NoncommPolynomial":
        return cls({alternating_word(k): 1})

    @classmethod
    def parse(cls, text: str) -> "NoncommPolynomial":
        """Parse e.g. ``"2*WY - YW + 0.5"``, ``"WYWY"``, ``"(1+2j)*W"``."""
        src = text.replace(" ", "")
        if not src:
            raise ValueError("empty polynomial")
        # Split into signed terms at +/- that are not inside parentheses or an exponent.
        pieces, depth, start = [], 0, 0
        for i, ch in enumerate(src):
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
            elif ch in "+-" and depth == 0 and i > start and src[i - 1] not in "eE*":
                pieces.append(src[start:i])
                start = i
        pieces.append(src[start:])
        terms: dict[str, complex] = {}
        for piece in pieces:
            sign = 1
            if piece[:1] in "+-":
                sign = -1 if piece[0] == "-" else 1
                piece = piece[1:]
            m = re.fullmatch(r"(?:(?P<coef>[^*WY]+?)\*?)?(?P<word>[WY]*)", piece)
            if not m or (not m.group("coef") and not m.group("word")):
                raise ValueError(f"cannot parse term {piece!r} in {text!r}")
            coef = _parse_number(m.group("coef")) if m.group("coef") else 1
            terms[m.group("word")] = terms.get(m.group("word"), 0) + sign * coef
        return cls(terms)

    def __add__(self, other: "NoncommPolynomial") -> "NoncommPolynomial":
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, 0) + c
        return NoncommPolynomial(out)

    def __sub__(self, other: "NoncommPolynomial") -> "NoncommPolynomial":
        return self + other.scale(-1)

    def scale(self, c) -> "NoncommPolynomial":
        return NoncommPolynomial({w: c * v for w, v in self.terms.items()})

    def __mul__(self, other: "NoncommPolynomial") -> "NoncommPolynomial":
        out: dict[str, complex] = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                out[w1 + w2] = out.get(w1 + w2, 0) + c1 * c2
        return NoncommPolynomial(out)

    def __pow__(self, k: int) -> "NoncommPolynomial":
        out = NoncommPolynomial.constant(1)
        for _ in range(k):
            out = out * self
        return out

    @property
    def degree(self) -> int:
        return max((len(w) for w in self.terms), default=0)

    def letter_count(self, letter: str) -> int:
        """Occurrences of ``letter`` summed over monomials."""
        return sum(w.count(letter) for w in self.terms)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for w, c in self.terms.items():
            cs = _format_number(c)
            if not w:
                parts.append(cs)
            elif cs == "1":
                parts.append(w)
            elif cs == "-1":
                parts.append("-" + w)
            else:
                parts.append(f"{cs}*{w}")
        return " + ".join(parts).replace("+ -", "- ")


def _parse_number(text: str):
    text = text.strip("()")
    if "j" in text:
        return complex(text)
    try:
        return int(text)
    except ValueError:
        return float(text)


def _format_number(c) -> str:
    if isinstance(c, complex):
        if c.imag == 0:
            c = c.real
        else:
            return f"({c.real!r}{c.imag:+}j)"
    if isinstance(c, float) and c.is_integer():
        return str(int(c))
    return str(c)


# -- mixed moments of a free pair --------------------------------------------


def _cumulants_for(word: str, m_w: MomentSequence, m_y: MomentSequence):
    need = {"W": word.count("W"), "Y": word.count("Y")}
    out = {}
    for letter, ms in (("W", m_w), ("Y", m_y)):
        if need[letter] == 0:
            out[letter] = ()
            continue
        if len(ms) < need[letter]:
            raise ValueError(f"need {need[letter]} moments of {letter}, have {len(ms)}")
        out[letter] = moments_to_cumulants(ms.truncate(need[letter])).values
    return out


def free_word_moment(
    word: str,
    m_w: MomentSequence,
    m_y: MomentSequence,
    cap: int = MOMENT_CAP,
    method: str = "dp",
):
    """``phi(word(w, y))`` for free w, y with the given marginal moments.

    Sums, over non-crossing partitions of the word's positions whose blocks
    are monochromatic, the product of block cumulants. ``method="dp"`` does
    this with an interval recursion; ``method="enumerate"`` lists NC(|word|)
    explicitly (only feasible for short words).
    """
    check_word(word)
    L = len(word)
    if L == 0:
        return 1
    _check_order(L, cap)
    kap = _cumulants_for(word, m_w, m_y)
    if method == "enumerate":
        total = 0
        for p in enumerate_nc(L):
            if is_monochromatic(p, word):
                term = 1
                for block in p.blocks:
                    term = term * kap[word[block[0] - 1]][len(block) - 1]
                total = total + term
        return total
    if method != "dp":
        raise ValueError(f"unknown method {method!r}")

    @lru_cache(maxsize=None)
    def interval(i: int, j: int):
        # Weighted sum over admissible partitions of positions i..j-1.
        if i >= j:
            return 1
        return block_from(i, j, 1)

    @lru_cache(maxsize=None)
    def block_from(p: int, j: int, size: int):
        # The current block holds `size` positions, the last one being p; it
        # either closes here or continues at a later same-colored position q.
        c = word[p]
        total = kap[c][size - 1] * interval(p + 1, j)
        for q in range(p + 1, j):
            if word[q] == c:
                total = total + interval(p + 1, q) * block_from(q, j, size + 1)
        return total

    return interval(0, L)


def free_poly_moment(p: NoncommPolynomial, m_w: MomentSequence, m_y: MomentSequence):
    """Linear extension of :func:`free_word_moment`; the constant term is
    returned as is."""
    return sum(c * free_word_moment(w, m_w, m_y) for w, c in p.terms.items())


@lru_cache(maxsize=None)
def genus_zero_pairs(n: int) -> tuple:
    """Pairs (alpha, beta) of S_n with ``#alpha + #(alpha^-1 beta) +
    #(beta^-1 gamma) = 2n + 1``, as ``(alpha cycles, phi(alpha^-1 beta),
    cycle lengths of beta^-1 gamma)``."""
    group = enumerate_sn(n)
    gamma = full_cycle(n)
    out = []
    for alpha in group:
        alpha_inv = inverse(alpha)
        for beta in group:
            if genus(alpha, beta) == 2 * n + 1:
                out.append(
                    (
                        tuple(cycles(alpha)),
                        asymptotic_phi(compose(alpha_inv, beta)),
                        cycle_type(compose(inverse(beta), gamma)).parts,
                    )
                )
    return tuple(out)


def genus_zero_moment(k: Sequence[int], m_w: MomentSequence, m_y: MomentSequence):
    """``phi(w^{k_1} y ... w^{k_n} y)`` as a sum over the genus-zero pairs of
    S_n, weighted by the leading Weingarten coefficient."""
    n = len(k)
    if n < 1:
        raise ValueError("k must be nonempty")
    total = 0
    for alpha_cycles, phi, y_lengths in genus_zero_pairs(n):
        term = phi
        for theta in alpha_cycles:
            term = term * m_w[sum(k[i - 1] for i in theta)]
        for length in y_lengths:
            term = term * m_y[length]
        total = total + term
    return total


# -- free convolutions ------------------------------------------------------


def free_additive_convolution(m_a: MomentSequence, m_b: MomentSequence) -> MomentSequence:
    """Moments of a + b for free a, b: free cumulants add."""
    K = min(m_a.K, m_b.K)
    ka = moments_to_cumulants(m_a.truncate(K))
    kb = moments_to_cumulants(m_b.truncate(K))
    return cumulants_to_moments([x + y for x, y in zip(ka.values, kb.values)])


def free_multiplicative_convolution(m_a: MomentSequence, m_b: MomentSequence) -> MomentSequence:
    """Moments of ab for free a, b, via the alternating words (WY)^n.

    Meaningful as a measure only when one side lives on [0, inf); that is the
    caller's responsibility.
    """
    K = min(m_a.K, m_b.K)
    _check_order(2 * K, MOMENT_CAP)
    return MomentSequence([free_word_moment("WY" * n, m_a, m_b) for n in range(1, K + 1)])


def as_float(ms: MomentSequence | Iterable) -> list[float]:
    vals = ms.values if isinstance(ms, MomentSequence) else ms
    return [float(v) for v in vals]


def exact(x):
    """Coerce a decimal string or number to an exact Fraction when possible."""
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    return Fraction(str(x))

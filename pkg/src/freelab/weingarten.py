"""Exact unitary Weingarten calculus.

``Wg(N, .)`` is the inverse of ``sigma -> N**#sigma`` in the group algebra of
S_n. It is computed here by an exact rational solve over conjugacy classes.
"""
from __future__ import annotations

import threading
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Mapping, Sequence, Union

from .ncpart import catalan
from .perm import (
    CycleType,
    Permutation,
    compose,
    cycle_count,
    cycle_type,
    cycles,
    enumerate_sn,
    full_cycle,
    integer_partitions,
    inverse,
)

WG_CAP = 5
WG_HARD_CAP = 6


class SingularSystemError(ValueError):
    """Raised when N < n, where the Gram system has no unique solution."""


@dataclass(frozen=True)
class WeingartenTable:
    n: int
    N: int
    values: Mapping[CycleType, Fraction] = field(repr=False)

    def __call__(self, sigma: Permutation | CycleType) -> Fraction:
        if isinstance(sigma, Permutation):
            if sigma.n != self.n:
                raise ValueError(f"permutation of degree {sigma.n} in a table for S_{self.n}")
            sigma = cycle_type(sigma)
        return self.values[sigma]

    def rows(self) -> list[tuple[CycleType, Fraction]]:
        return [(t, self.values[t]) for t in integer_partitions(self.n)[::-1]]


def solve_exact(matrix: Sequence[Sequence], rhs: Sequence) -> list[Fraction]:
    """Gauss-Jordan elimination over the rationals."""
    n = len(matrix)
    a = [[Fraction(x) for x in row] + [Fraction(b)] for row, b in zip(matrix, rhs)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            raise SingularSystemError("singular linear system")
        a[col], a[pivot] = a[pivot], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n] for row in a]


@lru_cache(maxsize=None)
def _class_counts(n: int) -> tuple[tuple[CycleType, ...], tuple[tuple[tuple[int, ...], ...], ...]]:
    # counts[i][j][c] = #{tau in class j : #(sigma_i tau^{-1}) = c}, sigma_i a
    # representative of class i. Independent of N, so cached per n.
    types = tuple(integer_partitions(n)[::-1])
    index = {t: j for j, t in enumerate(types)}
    group = enumerate_sn(n, cap=WG_HARD_CAP)
    tau_info = [(index[cycle_type(t)], inverse(t)) for t in group]
    counts = []
    for t in types:
        sigma = t.representative()
        row = [[0] * (n + 1) for _ in types]
        for j, tau_inv in tau_info:
            row[j][cycle_count(compose(sigma, tau_inv))] += 1
        counts.append(tuple(tuple(r) for r in row))
    return types, tuple(counts)


_table_lock = threading.Lock()
_tables: dict[tuple[int, int], WeingartenTable] = {}


def weingarten_table(n: int, N: int, cap: int = WG_CAP) -> WeingartenTable:
    """Exact ``Wg(N, .)`` on S_n keyed by cycle type.

    Solves, one equation per cycle type,
    ``sum_tau N**#(sigma tau^-1) Wg(N, tau) = [sigma = id]``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > max(cap, WG_CAP) or n > WG_HARD_CAP:
        raise ValueError(f"n={n} exceeds Weingarten cap {cap}")
    if N < n:
        raise SingularSystemError(f"Weingarten system is singular for N={N} < n={n}")
    key = (n, N)
    with _table_lock:
        cached = _tables.get(key)
    if cached is not None:
        return cached
    if n == 6:
        warnings.warn("n=6 Weingarten table enumerates 720 permutations per class", stacklevel=2)
    types, counts = _class_counts(n)
    powers = [Fraction(N) ** c for c in range(n + 1)]
    matrix = [[sum(k * p for k, p in zip(cell, powers)) for cell in row] for row in counts]
    rhs = [1 if t.parts == (1,) * n else 0 for t in types]
    values = dict(zip(types, solve_exact(matrix, rhs)))
    table = WeingartenTable(n, N, values)
    with _table_lock:
        _tables.setdefault(key, table)
    return table


def weingarten_full_system(n: int, N: int) -> dict[Permutation, Fraction]:
    """Solve the unreduced n! x n! system, without assuming a class function.

    Only meant as a cross-check for small n.
    """
    if N < n:
        raise SingularSystemError(f"singular for N={N} < n={n}")
    group = enumerate_sn(n, cap=4)
    inv = [inverse(t) for t in group]
    matrix = [[Fraction(N) ** cycle_count(compose(s, ti)) for ti in inv] for s in group]
    rhs = [1 if s.is_identity() else 0 for s in group]
    return dict(zip(group, solve_exact(matrix, rhs)))


def asymptotic_phi(t: CycleType | Permutation) -> Fraction:
    """Leading coefficient of ``N**(2n - #alpha) Wg(N, alpha)`` as N grows:
    the product over cycles of ``(-1)**(l-1) * Catalan(l-1)``."""
    if isinstance(t, Permutation):
        t = cycle_type(t)
    out = Fraction(1)
    for length in t.parts:
        out *= (-1) ** (length - 1) * catalan(length - 1)
    return out


def scaled_weingarten(t: CycleType, N: int) -> Fraction:
    """``N**(2n - #alpha) * Wg(N, alpha)``, exactly."""
    return Fraction(N) ** (2 * t.n - t.count) * weingarten_table(t.n, N)(t)


TraceProvider = Union[Callable[[int], object], Sequence]


def _trace_fn(provider) -> Callable[[int], object]:
    if callable(provider):
        return provider
    return lambda j: provider[j]


def traces_of_diagonal(diag: Sequence) -> Callable[[int], object]:
    """``j -> Tr(D**j)`` for ``D = diag(diag)``; exact for Fraction/int entries."""
    diag = list(diag)
    cache: dict[int, object] = {}

    def tr(j: int):
        if j not in cache:
            cache[j] = sum(d**j for d in diag) if j else len(diag)
        return cache[j]

    return tr


def haar_conjugation_expectation(
    k: Sequence[int],
    moments_a: TraceProvider,
    moments_b: TraceProvider,
    N: int,
    cap: int = WG_CAP,
):
    """Exact ``E Tr[prod_i (U A^{k_i} U* B)]`` for Haar U on U(N).

    ``moments_a`` / ``moments_b`` give ``Tr(A**j)`` and ``Tr(B**j)``, either as
    callables or as sequences indexed by ``j`` (index 0 is ``Tr(I) = N``).
    The result is exact when the traces are ints or Fractions.
    """
    n = len(k)
    if n < 1:
        raise ValueError("k must be nonempty")
    if any(ki < 0 for ki in k):
        raise ValueError("exponents must be nonnegative")
    table = weingarten_table(n, N, cap=cap)
    tr_a, tr_b = _trace_fn(moments_a), _trace_fn(moments_b)
    group = enumerate_sn(n, cap=WG_HARD_CAP)
    gamma = full_cycle(n)

    a_terms = {}
    for alpha in group:
        prod = 1
        for theta in cycles(alpha):
            prod = prod * tr_a(sum(k[i - 1] for i in theta))
        a_terms[alpha] = prod
    b_terms = {}
    for beta in group:
        prod = 1
        for length in cycle_type(compose(inverse(beta), gamma)).parts:
            prod = prod * tr_b(length)
        b_terms[beta] = prod

    total = 0
    for alpha in group:
        alpha_inv = inverse(alpha)
        for beta in group:
            total = total + table(compose(alpha_inv, beta)) * a_terms[alpha] * b_terms[beta]
    return total


def genus(alpha: Permutation, beta: Permutation) -> int:
    """``#alpha + #(alpha^-1 beta) + #(beta^-1 gamma)``; at most 2n+1."""
    gamma = full_cycle(alpha.n)
    return (
        cycle_count(alpha)
        + cycle_count(compose(inverse(alpha), beta))
        + cycle_count(compose(inverse(beta), gamma))
    )

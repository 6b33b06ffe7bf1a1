"""Random-matrix samplers and dense Hermitian linear algebra."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Union

import numpy as np

from .freemoments import (
    MomentSequence,
    NoncommPolynomial,
    bernoulli_moments,
    check_word,
    exact,
    point_moments,
    uniform_moments,
)

HERMITIAN_TOL = 1e-12
RANK_TOL = 1e-10


@dataclass(frozen=True)
class RngStream:
    """Independent, reproducible stream ``stream_id`` under ``master_seed``."""

    master_seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(entropy=self.master_seed, spawn_key=(self.stream_id,))
        return np.random.Generator(np.random.PCG64(seq))


RngLike = Union[RngStream, np.random.Generator]


def as_generator(rng: RngLike) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError(f"expected RngStream or numpy Generator, got {type(rng).__name__}")


# -- samplers ---------------------------------------------------------------


def sample_complex_gaussian(m: int, n: int, rng: RngLike, size: tuple = ()) -> np.ndarray:
    """i.i.d. standard complex normals: real and imaginary parts N(0, 1/2)."""
    if m < 1 or n < 1:
        raise ValueError("dimensions must be >= 1")
    g = as_generator(rng)
    z = g.standard_normal((*size, m, n, 2)) * math.sqrt(0.5)
    return z[..., 0] + 1j * z[..., 1]


def sample_wishart(N: int, M: int, rng: RngLike) -> np.ndarray:
    """``X* X / M`` for an M x N standard complex Gaussian X."""
    x = sample_complex_gaussian(M, N, rng)
    w = x.conj().T @ x / M
    return (w + w.conj().T) / 2


def sample_wigner(N: int, rng: RngLike) -> np.ndarray:
    """Complex Wigner matrix scaled by 1/sqrt(N), so its ESD tends to the
    unit-variance semicircle on [-2, 2]."""
    g = as_generator(rng)
    z = sample_complex_gaussian(N, N, g)
    upper = np.triu(z, 1)
    h = upper + upper.conj().T + np.diag(g.standard_normal(N))
    return h / math.sqrt(N)


def sample_haar_unitary(N: int, rng: RngLike, size: tuple = ()) -> np.ndarray:
    """Haar unitary via QR of a Ginibre matrix, with each column of Q
    multiplied by the phase of the matching diagonal entry of R."""
    z = sample_complex_gaussian(N, N, rng, size=size)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    return q * (d / np.abs(d))[..., None, :]


# -- linear algebra ---------------------------------------------------------


def is_hermitian(h: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        return False
    scale = max(1.0, float(np.max(np.abs(h))) if h.size else 1.0)
    return bool(np.max(np.abs(h - h.conj().T), initial=0.0) <= tol * scale)


def hermitian_eigen(h: np.ndarray, tol: float = HERMITIAN_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Ascending real eigenvalues and a unitary eigenbasis ``V`` with
    ``H = V diag(eigs) V*``."""
    h = np.asarray(h)
    if not is_hermitian(h, tol):
        raise ValueError("matrix is not Hermitian within tolerance")
    return np.linalg.eigh(h)


def spectral_truncate_matrix(y: np.ndarray, M: float) -> tuple[np.ndarray, int]:
    """Zero every eigenvalue of modulus > M. Returns the truncated matrix and
    the number of eigenvalues removed, which is the rank of the change."""
    if not M > 0:
        raise ValueError("M must be positive")
    eigs, v = hermitian_eigen(y)
    keep = np.abs(eigs) <= M
    if keep.all():
        return np.array(y, copy=True), 0
    yp = (v * np.where(keep, eigs, 0.0)) @ v.conj().T
    return (yp + yp.conj().T) / 2, int(np.count_nonzero(~keep))


def psd_sqrt(h: np.ndarray) -> np.ndarray:
    eigs, v = hermitian_eigen(h)
    root = (v * np.sqrt(np.clip(eigs, 0.0, None))) @ v.conj().T
    return (root + root.conj().T) / 2


def numerical_rank(a: np.ndarray, tol: float = RANK_TOL) -> int:
    """Singular values above ``tol`` times the largest one."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    s = np.linalg.svd(np.asarray(a), compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.count_nonzero(s > tol * s[0]))


def _square_dim(assign: Mapping[str, np.ndarray]) -> int:
    dims = {np.shape(m) for m in assign.values()}
    if len(dims) != 1:
        raise ValueError(f"matrices have different shapes: {sorted(dims)}")
    (shape,) = dims
    if len(shape) != 2 or shape[0] != shape[1]:
        raise ValueError(f"matrices must be square, got {shape}")
    return shape[0]


def evaluate_word(assign: Mapping[str, np.ndarray], word: str) -> np.ndarray:
    """Ordered product of the word's letters; the empty word is the identity."""
    check_word(word)
    n = _square_dim(assign)
    out = np.eye(n, dtype=complex)
    for letter in word:
        out = out @ assign[letter]
    return out


def trace_of_poly(assign: Mapping[str, np.ndarray], p: NoncommPolynomial, normalized: bool = False) -> complex:
    n = _square_dim(assign)
    total = 0j
    # Products are shared across words with common prefixes.
    cache: dict[str, np.ndarray] = {"": np.eye(n, dtype=complex)}

    def product(word):
        if word not in cache:
            cache[word] = product(word[:-1]) @ assign[word[-1]]
        return cache[word]

    for word, c in p.terms.items():
        total += c * (np.trace(product(word)) if word else n)
    return total / n if normalized else total


# -- Y matrices -------------------------------------------------------------


@dataclass(frozen=True)
class Dist:
    """Scalar law for diagonal entries: bernoulli (+-1), uniform(a, b),
    cauchy (standard), point(c)."""

    kind: str
    a: float = 0.0
    b: float = 1.0

    KINDS = ("bernoulli", "uniform", "cauchy", "point")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown distribution {self.kind!r}")
        if self.kind == "uniform" and not self.b > self.a:
            raise ValueError("uniform needs a < b")

    @classmethod
    def parse(cls, text: str) -> "Dist":
        """``bernoulli``, ``uniform:a:b``, ``cauchy``, ``point:c``."""
        name, *args = text.strip().split(":")
        name = {"bernoulli_pm1": "bernoulli"}.get(name, name)
        try:
            if name == "uniform":
                a, b = (float(v) for v in args) if args else (0.0, 1.0)
                return cls("uniform", a, b)
            if name == "point":
                (c,) = args
                return cls("point", float(c))
            if args:
                raise ValueError
            return cls(name)
        except ValueError as exc:
            raise ValueError(f"bad distribution spec {text!r}") from exc

    def __str__(self):
        if self.kind == "uniform":
            return f"uniform:{self.a!r}:{self.b!r}"
        if self.kind == "point":
            return f"point:{self.a!r}"
        return self.kind

    def sample(self, n: int, rng: RngLike) -> np.ndarray:
        g = as_generator(rng)
        if self.kind == "bernoulli":
            return g.choice(np.array([-1.0, 1.0]), size=n)
        if self.kind == "uniform":
            return g.uniform(self.a, self.b, size=n)
        if self.kind == "cauchy":
            return g.standard_cauchy(size=n)
        return np.full(n, float(self.a))

    def quantile(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if self.kind == "bernoulli":
            return np.where(u < 0.5, -1.0, 1.0)
        if self.kind == "uniform":
            return self.a + (self.b - self.a) * u
        if self.kind == "cauchy":
            return np.tan(math.pi * (u - 0.5))
        return np.full(u.shape, float(self.a))

    def moments(self, K: int, exact_values: bool = False) -> MomentSequence:
        """Moment sequence; the Cauchy law has none and raises."""
        conv = exact if exact_values else float
        if self.kind == "bernoulli":
            return bernoulli_moments(K)
        if self.kind == "uniform":
            return uniform_moments(conv(self.a), conv(self.b), K)
        if self.kind == "point":
            return point_moments(conv(self.a), K)
        raise ValueError("the Cauchy law has no moments")

    def tail(self, M: float) -> float:
        """``P(|X| > M)``."""
        if self.kind == "cauchy":
            return 1 - 2 * math.atan(M) / math.pi
        if self.kind == "bernoulli":
            return 1.0 if M < 1 else 0.0
        if self.kind == "point":
            return 1.0 if abs(self.a) > M else 0.0
        lo, hi = max(self.a, -M), min(self.b, M)
        return 1.0 - max(0.0, hi - lo) / (self.b - self.a)


@dataclass(frozen=True)
class YSpec:
    """How to build the Hermitian matrix Y.

    ``diag_iid``: i.i.d. diagonal from ``dist``; ``diag_quantile``: the
    deterministic quantiles ``F^-1((i - 1/2)/N)`` on the diagonal;
    ``conjugated``: ``U D U*`` with an independent Haar U and D from ``inner``.
    """

    kind: str
    dist: Dist | None = None
    inner: "YSpec | None" = None

    def __post_init__(self):
        if self.kind in ("diag_iid", "diag_quantile"):
            if self.dist is None:
                raise ValueError(f"{self.kind} needs a distribution")
        elif self.kind == "conjugated":
            if self.inner is None:
                raise ValueError("conjugated needs an inner spec")
        else:
            raise ValueError(f"unknown Y spec {self.kind!r}")

    @classmethod
    def parse(cls, text: str) -> "YSpec":
        """E.g. ``diag_iid:bernoulli``, ``diag_quantile:point:1``,
        ``conjugated:diag_iid:uniform:0:1``. A bare distribution means
        ``diag_iid``."""
        head, _, rest = text.strip().partition(":")
        if head == "conjugated":
            return cls("conjugated", inner=cls.parse(rest))
        if head in ("diag_iid", "diag_quantile"):
            return cls(head, dist=Dist.parse(rest))
        return cls("diag_iid", dist=Dist.parse(text))

    def __str__(self):
        if self.kind == "conjugated":
            return f"conjugated:{self.inner}"
        return f"{self.kind}:{self.dist}"

    @property
    def base_dist(self) -> Dist:
        return self.inner.base_dist if self.kind == "conjugated" else self.dist

    def moments(self, K: int, exact_values: bool = False) -> MomentSequence:
        """Moments of the limiting spectral law of Y."""
        return self.base_dist.moments(K, exact_values)


def make_y_matrix(spec: YSpec | str, N: int, rng: RngLike) -> np.ndarray:
    if isinstance(spec, str):
        spec = YSpec.parse(spec)
    g = as_generator(rng)
    if spec.kind == "diag_iid":
        return np.diag(spec.dist.sample(N, g)).astype(complex)
    if spec.kind == "diag_quantile":
        return np.diag(spec.dist.quantile((np.arange(N) + 0.5) / N)).astype(complex)
    d = make_y_matrix(spec.inner, N, g)
    u = sample_haar_unitary(N, g)
    y = u @ d @ u.conj().T
    return (y + y.conj().T) / 2

"""Spectral measures: empirical spectra, limit laws, and the sup distance."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np
from scipy import integrate

from .freemoments import MomentSequence

WEIGHT_TOL = 1e-12


class DiscreteSpectralMeasure:
    """Finitely many atoms with positive weights summing to one.

    Atoms at exactly equal locations are merged; nothing is merged by
    tolerance.
    """

    def __init__(self, locations, weights):
        loc = np.asarray(locations, dtype=float).ravel()
        w = np.asarray(weights, dtype=float).ravel()
        if loc.shape != w.shape:
            raise ValueError("locations and weights differ in length")
        if loc.size == 0:
            raise ValueError("empty measure")
        if not np.all(np.isfinite(loc)) or np.any(w <= 0):
            raise ValueError("atoms need finite locations and positive weights")
        total = math.fsum(w)
        if abs(total - 1.0) > WEIGHT_TOL:
            raise ValueError(f"weights sum to {total!r}, not 1")
        uniq, inv = np.unique(loc, return_inverse=True)
        self.locations = uniq
        self.weights = np.bincount(inv, weights=w, minlength=uniq.size)
        self.locations.setflags(write=False)
        self.weights.setflags(write=False)

    def __len__(self):
        return self.locations.size

    def __repr__(self):
        return f"DiscreteSpectralMeasure({len(self)} atoms)"

    def atoms(self) -> list[tuple[float, float]]:
        return list(zip(self.locations.tolist(), self.weights.tolist()))

    @cached_property
    def _cum(self) -> np.ndarray:
        c = np.cumsum(self.weights)
        c[-1] = 1.0
        return c

    def cdf(self, x):
        """Right-continuous CDF, vectorized."""
        idx = np.searchsorted(self.locations, x, side="right")
        return np.where(idx > 0, self._cum[np.maximum(idx - 1, 0)], 0.0)

    def cdf_left(self, x):
        idx = np.searchsorted(self.locations, x, side="left")
        return np.where(idx > 0, self._cum[np.maximum(idx - 1, 0)], 0.0)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["location", "weight"])
            for x, w in self.atoms():
                writer.writerow([repr(x), repr(w)])

    def histogram_csv(self, path, bins: int | Sequence[float] = 50) -> None:
        mass, edges = np.histogram(self.locations, bins=bins, weights=self.weights)
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["bin_left", "bin_right", "mass"])
            for lo, hi, m in zip(edges[:-1], edges[1:], mass):
                writer.writerow([repr(float(lo)), repr(float(hi)), repr(float(m))])


def esd_from_eigenvalues(eigs) -> DiscreteSpectralMeasure:
    eigs = np.asarray(eigs, dtype=float).ravel()
    if eigs.size == 0:
        raise ValueError("no eigenvalues")
    return DiscreteSpectralMeasure(eigs, np.full(eigs.size, 1.0 / eigs.size))


def average_measures(ms: Sequence[DiscreteSpectralMeasure]) -> DiscreteSpectralMeasure:
    """Equal-weight mixture, the replicate estimator of an expected ESD."""
    if not ms:
        raise ValueError("no measures to average")
    loc = np.concatenate([m.locations for m in ms])
    w = np.concatenate([m.weights for m in ms]) / len(ms)
    return DiscreteSpectralMeasure(loc, w)


def truncate_measure(mu: DiscreteSpectralMeasure, M: float) -> DiscreteSpectralMeasure:
    """Move the mass outside [-M, M] to an atom at 0."""
    if not M > 0:
        raise ValueError("M must be positive")
    inside = np.abs(mu.locations) <= M
    if inside.all():
        return mu
    excess = math.fsum(mu.weights[~inside])
    loc = np.append(mu.locations[inside], 0.0)
    w = np.append(mu.weights[inside], excess)
    return DiscreteSpectralMeasure(loc, w)


def measure_moments(mu: DiscreteSpectralMeasure, K: int) -> MomentSequence:
    return MomentSequence([float(np.dot(mu.weights, mu.locations**j)) for j in range(1, K + 1)])


# -- limit laws -------------------------------------------------------------


@dataclass(frozen=True)
class MpLaw:
    """Marchenko-Pastur law with aspect ratio ``lam`` (atom 1 - 1/lam at 0
    when lam > 1)."""

    lam: float

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f"aspect ratio must be positive, got {self.lam!r}")

    @property
    def lower(self) -> float:
        return (1 - math.sqrt(self.lam)) ** 2

    @property
    def upper(self) -> float:
        return (1 + math.sqrt(self.lam)) ** 2

    @property
    def atom(self) -> float:
        return max(0.0, 1 - 1 / self.lam)

    @property
    def atoms(self) -> tuple[float, ...]:
        return (0.0,) if self.lam > 1 else ()

    @property
    def support(self) -> tuple[float, float]:
        return (min(0.0, self.lower), self.upper)

    def density(self, x):
        x = np.asarray(x, dtype=float)
        lo, hi = self.lower, self.upper
        inside = (x > lo) & (x < hi) & (x > 0)
        safe = np.where(inside, x, 1.0)
        val = np.sqrt(np.clip((hi - safe) * (safe - lo), 0, None)) / (2 * math.pi * self.lam * safe)
        return np.where(inside, val, 0.0)

    def _continuous_mass(self, x: float) -> float:
        # Substituting x = lo + (hi - lo)(1 - cos t)/2 removes the square-root
        # endpoint behaviour; for lam = 1 the 1/sqrt(x) pole cancels as well.
        lo, hi = self.lower, self.upper
        if x <= lo:
            return 0.0
        if x >= hi:
            return 1.0 - self.atom
        half = (hi - lo) / 2
        t_end = math.acos(1 - (x - lo) / half)

        def integrand(t):
            if lo == 0.0:
                # sin(t)^2 / (2 sin(t/2)^2) = 2 cos(t/2)^2, free of 0/0 near t = 0.
                return half * math.cos(t / 2) ** 2 / (math.pi * self.lam)
            return half * half * math.sin(t) ** 2 / (2 * math.pi * self.lam * (lo + 2 * half * math.sin(t / 2) ** 2))

        val, _ = integrate.quad(integrand, 0.0, t_end, epsabs=1e-12, epsrel=1e-12, limit=200)
        return val

    def cdf(self, x):
        return _vectorize(lambda v: (self.atom if v >= 0 else 0.0) + self._continuous_mass(v), x)

    def jump(self, x):
        return np.where(np.asarray(x) == 0.0, self.atom, 0.0)

    def cdf_left(self, x):
        return self.cdf(x) - self.jump(x)


def mp_cdf(law: MpLaw | float, x):
    if not isinstance(law, MpLaw):
        law = MpLaw(law)
    return law.cdf(x)


@dataclass(frozen=True)
class SemicircleLaw:
    """Semicircle law of variance ``radius**2 / 4`` (unit variance by default)."""

    radius: float = 2.0

    atoms = ()

    @property
    def support(self) -> tuple[float, float]:
        return (-self.radius, self.radius)

    def density(self, x):
        x = np.asarray(x, dtype=float)
        r = self.radius
        return np.where(np.abs(x) < r, 2 * np.sqrt(np.clip(r * r - x * x, 0, None)) / (math.pi * r * r), 0.0)

    def cdf(self, x):
        u = np.clip(np.asarray(x, dtype=float) / self.radius, -1.0, 1.0)
        return 0.5 + (u * np.sqrt(1 - u * u) + np.arcsin(u)) / math.pi

    cdf_left = cdf

    def jump(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class AffineLaw:
    """Law of ``scale * X + shift`` for X distributed as ``base``, scale > 0."""

    base: object
    shift: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError("scale must be positive")

    @property
    def atoms(self) -> tuple[float, ...]:
        return tuple(self.scale * a + self.shift for a in self.base.atoms)

    @property
    def support(self) -> tuple[float, float]:
        lo, hi = self.base.support
        return (self.scale * lo + self.shift, self.scale * hi + self.shift)

    def cdf(self, x):
        return self.base.cdf((np.asarray(x, dtype=float) - self.shift) / self.scale)

    def cdf_left(self, x):
        return self.base.cdf_left((np.asarray(x, dtype=float) - self.shift) / self.scale)

    def jump(self, x):
        return self.base.jump((np.asarray(x, dtype=float) - self.shift) / self.scale)


def _vectorize(fn, x):
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        return float(fn(float(arr)))
    return np.array([fn(float(v)) for v in arr.ravel()]).reshape(arr.shape)


def _is_discrete(m) -> bool:
    return isinstance(m, DiscreteSpectralMeasure)


def kolmogorov_distance(a, b) -> float:
    """``sup_x |F_a(x) - F_b(x)|``.

    Exact when at least one side is discrete: both CDFs are compared at every
    breakpoint, from the right and from the left. Two continuous laws are
    compared on a fine grid.
    """
    if not _is_discrete(a) and _is_discrete(b):
        a, b = b, a
    if _is_discrete(a) and _is_discrete(b):
        pts = np.union1d(a.locations, b.locations)
        return float(np.max(np.abs(a.cdf(pts) - b.cdf(pts))))
    if _is_discrete(a):
        pts = np.union1d(a.locations, np.asarray(b.atoms, dtype=float))
        g = np.asarray(b.cdf(pts), dtype=float)
        right = np.abs(a.cdf(pts) - g)
        left = np.abs(a.cdf_left(pts) - (g - b.jump(pts)))
        return float(max(right.max(), left.max()))
    lo = min(a.support[0], b.support[0])
    hi = max(a.support[1], b.support[1])
    grid = np.union1d(np.linspace(lo, hi, 4001), np.asarray(a.atoms + b.atoms, dtype=float))
    right = np.abs(np.asarray(a.cdf(grid)) - np.asarray(b.cdf(grid)))
    left = np.abs(np.asarray(a.cdf_left(grid)) - np.asarray(b.cdf_left(grid)))
    return float(max(right.max(), left.max()))

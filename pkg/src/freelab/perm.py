"""Permutations of {1, ..., n} with exact cycle bookkeeping.

Composition is right-to-left: ``compose(a, b)(i) == a(b(i))``.  All external
I/O (images, cycles, cycle notation) is 1-based.
"""
from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

SN_CAP = 6


@dataclass(frozen=True, order=True)
class CycleType:
    """Cycle lengths of a permutation, sorted descending."""

    parts: tuple[int, ...]

    def __post_init__(self):
        parts = tuple(sorted((int(p) for p in self.parts), reverse=True))
        if not parts or any(p < 1 for p in parts):
            raise ValueError(f"invalid cycle type {self.parts!r}")
        object.__setattr__(self, "parts", parts)

    @property
    def n(self) -> int:
        return sum(self.parts)

    @property
    def count(self) -> int:
        """Number of cycles."""
        return len(self.parts)

    def representative(self) -> "Permutation":
        """A permutation with this cycle type (consecutive blocks)."""
        images = []
        start = 1
        for length in self.parts:
            images.extend(range(start + 1, start + length))
            images.append(start)
            start += length
        return Permutation(images)

    def class_size(self) -> int:
        size = math.factorial(self.n)
        for length, mult in _multiplicities(self.parts).items():
            size //= length**mult * math.factorial(mult)
        return size

    def __str__(self):
        return "[" + ",".join(str(p) for p in self.parts) + "]"


def _multiplicities(parts):
    out: dict[int, int] = {}
    for p in parts:
        out[p] = out.get(p, 0) + 1
    return out


@dataclass(frozen=True)
class Permutation:
    """A bijection of {1, ..., n} stored by its image list."""

    images: tuple[int, ...]

    def __post_init__(self):
        images = tuple(int(v) for v in self.images)
        if not images:
            raise ValueError("permutation degree must be >= 1")
        if sorted(images) != list(range(1, len(images) + 1)):
            raise ValueError(f"{images!r} is not a bijection of 1..{len(images)}")
        object.__setattr__(self, "images", images)

    @property
    def n(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i - 1]

    def __mul__(self, other: "Permutation") -> "Permutation":
        return compose(self, other)

    def inverse(self) -> "Permutation":
        return inverse(self)

    def cycles(self) -> list[tuple[int, ...]]:
        return cycles(self)

    @property
    def cycle_count(self) -> int:
        return cycle_count(self)

    def cycle_type(self) -> CycleType:
        return cycle_type(self)

    def is_identity(self) -> bool:
        return all(v == i for i, v in enumerate(self.images, start=1))

    def __str__(self):
        return format_cycles(self)


def identity(n: int) -> Permutation:
    if n < 1:
        raise ValueError("n must be >= 1")
    return Permutation(range(1, n + 1))


def compose(a: Permutation, b: Permutation) -> Permutation:
    """Return ``a o b``, i.e. the map ``i -> a(b(i))``."""
    if a.n != b.n:
        raise ValueError(f"degree mismatch: {a.n} vs {b.n}")
    ai = a.images
    return Permutation(tuple(ai[j - 1] for j in b.images))


def inverse(a: Permutation) -> Permutation:
    out = [0] * a.n
    for i, v in enumerate(a.images, start=1):
        out[v - 1] = i
    return Permutation(out)


def cycles(a: Permutation) -> list[tuple[int, ...]]:
    """Cycle decomposition, each cycle starting at its smallest point,
    cycles ordered by that point. Fixed points are included."""
    seen = [False] * (a.n + 1)
    out = []
    for start in range(1, a.n + 1):
        if seen[start]:
            continue
        cyc = []
        i = start
        while not seen[i]:
            seen[i] = True
            cyc.append(i)
            i = a.images[i - 1]
        out.append(tuple(cyc))
    return out


def cycle_count(a: Permutation) -> int:
    return len(cycles(a))


def cycle_type(a: Permutation) -> CycleType:
    return CycleType(tuple(len(c) for c in cycles(a)))


def full_cycle(n: int) -> Permutation:
    """The n-cycle 1 -> 2 -> ... -> n -> 1."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return Permutation(tuple(range(2, n + 1)) + (1,))


def enumerate_sn(n: int, cap: int = SN_CAP) -> list[Permutation]:
    """All n! permutations in lexicographic order of their image lists."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > cap:
        raise ValueError(f"S_{n} enumeration exceeds cap {cap}")
    return [Permutation(p) for p in itertools.permutations(range(1, n + 1))]


def integer_partitions(n: int) -> list[CycleType]:
    """All cycle types of S_n, from [n] down to [1,...,1]."""
    out = []

    def rec(remaining, largest, acc):
        if remaining == 0:
            out.append(CycleType(tuple(acc)))
            return
        for p in range(min(remaining, largest), 0, -1):
            rec(remaining - p, p, acc + [p])

    rec(n, n, [])
    return out


def from_cycles(cyc: Iterable[Sequence[int]], n: int | None = None) -> Permutation:
    cyc = [tuple(c) for c in cyc]
    points = [p for c in cyc for p in c]
    if len(points) != len(set(points)):
        raise ValueError("cycles are not disjoint")
    if n is None:
        n = max(points, default=0)
    images = list(range(1, n + 1))
    for c in cyc:
        for k, p in enumerate(c):
            if not 1 <= p <= n:
                raise ValueError(f"point {p} outside 1..{n}")
            images[p - 1] = c[(k + 1) % len(c)]
    return Permutation(images)


_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def parse_cycles(text: str, n: int | None = None) -> Permutation:
    """Parse cycle notation such as ``"(1 2 4)(3)"``; ``"()"`` needs ``n``."""
    stripped = text.replace(" ", "").replace(",", "")
    if not stripped or _CYCLE_RE.sub("", text).strip():
        raise ValueError(f"malformed cycle notation {text!r}")
    cyc = []
    for body in _CYCLE_RE.findall(text):
        pts = [int(t) for t in re.split(r"[\s,]+", body.strip()) if t]
        if pts:
            cyc.append(pts)
    return from_cycles(cyc, n)


def format_cycles(a: Permutation) -> str:
    return "".join("(" + " ".join(str(p) for p in c) + ")" for c in cycles(a))

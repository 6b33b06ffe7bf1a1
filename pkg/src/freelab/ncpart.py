"""Set partitions of {1, ..., m}, with non-crossing enumeration."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

NC_CAP = 12


@dataclass(frozen=True)
class SetPartition:
    m: int
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        blocks = tuple(sorted((tuple(sorted(b)) for b in self.blocks), key=lambda b: b[0] if b else 0))
        if any(not b for b in blocks):
            raise ValueError("empty block")
        points = [p for b in blocks for p in b]
        if sorted(points) != list(range(1, self.m + 1)):
            raise ValueError(f"blocks {self.blocks!r} do not partition 1..{self.m}")
        object.__setattr__(self, "blocks", blocks)

    def block_sizes(self) -> tuple[int, ...]:
        return tuple(len(b) for b in self.blocks)

    def __len__(self):
        return len(self.blocks)

    def __str__(self):
        return "".join("{" + ",".join(map(str, b)) + "}" for b in self.blocks)


def is_noncrossing(p: SetPartition) -> bool:
    """True iff no a < b < c < d with a, c in one block and b, d in another."""
    owner = [0] * (p.m + 1)
    for idx, block in enumerate(p.blocks):
        for x in block:
            owner[x] = idx
    # Blocks are non-crossing iff, scanning left to right, every block closes
    # before any block opened after it is resumed (stack discipline).
    last = {idx: block[-1] for idx, block in enumerate(p.blocks)}
    stack: list[int] = []
    for x in range(1, p.m + 1):
        b = owner[x]
        if stack and stack[-1] == b:
            pass
        elif b in stack:
            return False
        else:
            stack.append(b)
        if x == last[b]:
            stack.pop()
    return True


def catalan(k: int) -> int:
    if k < 0:
        raise ValueError("k must be >= 0")
    return math.comb(2 * k, k) // (k + 1)


@lru_cache(maxsize=None)
def _nc_interval(lo: int, hi: int) -> tuple[tuple[tuple[int, ...], ...], ...]:
    # Non-crossing partitions of the interval lo..hi as tuples of blocks.
    if lo > hi:
        return ((),)
    out = []
    rest = list(range(lo + 1, hi + 1))
    # Choose the other members of lo's block; the gaps between consecutive
    # members (and after the last) are partitioned independently.
    for r in range(len(rest) + 1):
        for extra in itertools.combinations(rest, r):
            block = (lo,) + extra
            gaps = [(block[i] + 1, block[i + 1] - 1) for i in range(len(block) - 1)]
            gaps.append((block[-1] + 1, hi))
            partial = [(block,)]
            for g_lo, g_hi in gaps:
                partial = [acc + sub for acc in partial for sub in _nc_interval(g_lo, g_hi)]
            out.extend(partial)
    return tuple(out)


def enumerate_nc(m: int, cap: int = NC_CAP) -> list[SetPartition]:
    """All non-crossing partitions of {1..m}, Catalan(m) of them.

    The block containing 1 splits the rest into independent intervals, so the
    output is non-crossing by construction. Order is deterministic.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if m > cap:
        raise ValueError(f"NC({m}) enumeration exceeds cap {cap}")
    return [SetPartition(m, blocks) for blocks in _nc_interval(1, m)]


def enumerate_set_partitions(m: int) -> list[SetPartition]:
    """All Bell(m) set partitions via restricted growth strings (brute force)."""
    if m < 1:
        raise ValueError("m must be >= 1")
    out = []

    def rec(codes, nblocks):
        if len(codes) == m:
            blocks = [[] for _ in range(nblocks)]
            for i, c in enumerate(codes, start=1):
                blocks[c].append(i)
            out.append(SetPartition(m, tuple(tuple(b) for b in blocks)))
            return
        for c in range(nblocks + 1):
            rec(codes + [c], max(nblocks, c + 1))

    rec([], 0)
    return out


def is_monochromatic(p: SetPartition, colors: Sequence[str]) -> bool:
    """True iff every block of ``p`` carries a single color.

    ``colors`` is any length-m sequence over {"W", "Y"}, e.g. the word "WYWY".
    """
    if len(colors) != p.m:
        raise ValueError(f"coloring length {len(colors)} != {p.m}")
    return all(len({colors[i - 1] for i in block}) == 1 for block in p.blocks)


def parse_partition(text: str) -> SetPartition:
    """Parse ``"{1,3}{2}{4}"``."""
    body = text.strip()
    if not (body.startswith("{") and body.endswith("}")):
        raise ValueError(f"malformed partition {text!r}")
    blocks = []
    for chunk in body[1:-1].split("}{"):
        blocks.append(tuple(int(t) for t in chunk.split(",") if t.strip()))
    m = sum(len(b) for b in blocks)
    return SetPartition(m, tuple(blocks))

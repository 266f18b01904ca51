"""Seedable portable RNG used everywhere randomness is consumed.

splitmix64: one 64-bit word of state, one output per step. Chosen for
cross-language reproducibility; the algorithm id recorded in generator
metadata is "splitmix64".
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15

RNG_ID = "splitmix64"


def splitmix64_next(state: int) -> tuple[int, int]:
    """Advance one step; returns (new_state, output word)."""
    state = (state + GOLDEN) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return state, (z ^ (z >> 31)) & MASK64


class SplitMix64:
    """Stream wrapper around splitmix64_next."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state, out = splitmix64_next(self.state)
        return out

    def next_double(self) -> float:
        # 53-bit mantissa convention: uniform on [0, 1)
        return (self.next_u64() >> 11) * (2.0 ** -53)

    def next_below(self, bound: int) -> int:
        """Unbiased uniform integer in [0, bound); bound 1 consumes no draw."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        if bound == 1:
            return 0
        mask = (1 << (bound - 1).bit_length()) - 1
        while True:
            v = self.next_u64() & mask
            if v < bound:
                return v

    def next_bool(self) -> bool:
        return bool(self.next_u64() >> 63)

    def shuffle(self, seq) -> None:
        """In-place Fisher-Yates using next_below."""
        for i in range(len(seq) - 1, 0, -1):
            j = self.next_below(i + 1)
            seq[i], seq[j] = seq[j], seq[i]


def derive_seed(root: int, index: int) -> int:
    """Independent stream seed for substream `index` of root seed.

    Defined as the output of splitmix64 at state root + index*GOLDEN
    after one step, i.e. the (index+1)-th output of the root sequence.
    Stable across platforms and worker counts.
    """
    state = (root + (index & MASK64) * GOLDEN) & MASK64
    _, out = splitmix64_next(state)
    return out

"""Deterministic randomness for question ordering.

Question permutations must be reproducible from (session token, section id)
alone so that sessions can be audited and replayed, and so that independent
implementations of this wire format agree byte-for-byte. That rules out
``random.shuffle``: the algorithm here is pinned instead.

- stream: SplitMix64 (Steele/Lea/Vigna constants)
- seeding: FNV-1a 64-bit over ``token_utf8 ++ 0x00 ++ section_id_utf8``
- shuffle: Fisher-Yates, i from n-1 down to 1, j = next_u64() mod (i+1)
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1

FNV64_OFFSET_BASIS = 0xCBF29CE484222325
FNV64_PRIME = 0x100000001B3


class SplitMix64:
    """64-bit PRNG with a single u64 of state."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return (z ^ (z >> 31)) & _MASK64


def fnv1a64(data: bytes) -> int:
    """FNV-1a 64-bit hash of ``data``."""
    h = FNV64_OFFSET_BASIS
    for byte in data:
        h ^= byte
        h = (h * FNV64_PRIME) & _MASK64
    return h


def section_seed(session_token: str, section_id: str) -> int:
    """Shuffle seed for one section of one session."""
    return fnv1a64(session_token.encode() + b"\x00" + section_id.encode())


def seeded_shuffle(n: int, seed: int) -> list[int]:
    """Permutation of range(n) drawn from the SplitMix64 stream for ``seed``.

    Fisher-Yates with the modulo draw: at each step i (from n-1 down to 1)
    the swap partner is next_u64() mod (i+1). The modulo bias is irrelevant
    at survey sizes and keeping the draw rule trivial makes it easy to match
    in other languages.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    order = list(range(n))
    stream = SplitMix64(seed)
    for i in range(n - 1, 0, -1):
        j = stream.next_u64() % (i + 1)
        order[i], order[j] = order[j], order[i]
    return order

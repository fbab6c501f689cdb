"""Deterministic random streams.

Everything random in the package (task placement, per-episode sub-seeds,
the random baseline policy) draws from SplitMix64, a tiny generator whose
output is fully specified by integer arithmetic modulo 2**64. That keeps
episodes bit-reproducible across platforms and Python versions, which is
not guaranteed for ``random.Random`` helper methods or numpy ``Generator``
distribution methods.
"""
from __future__ import annotations

GENERATOR_NAME = "splitmix64-v1"

_MASK = 0xFFFFFFFFFFFFFFFF
_GOLDEN = 0x9E3779B97F4A7C15


def _mix(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


class SplitMix64:
    """SplitMix64 stream seeded with an arbitrary integer (reduced mod 2**64)."""

    __slots__ = ("_state",)

    def __init__(self, seed: int) -> None:
        self._state = int(seed) & _MASK

    def next_u64(self) -> int:
        self._state = s = (self._state + _GOLDEN) & _MASK
        s = ((s ^ (s >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        s = ((s ^ (s >> 27)) * 0x94D049BB133111EB) & _MASK
        return s ^ (s >> 31)

    def below(self, k: int) -> int:
        """Integer in ``[0, k)`` by multiply-shift; bias is at most k / 2**64."""
        self._state = s = (self._state + _GOLDEN) & _MASK
        s = ((s ^ (s >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        s = ((s ^ (s >> 27)) * 0x94D049BB133111EB) & _MASK
        return ((s ^ (s >> 31)) * k) >> 64

    def random(self) -> float:
        """Float in ``[0, 1)`` with 53 random bits."""
        return (self.next_u64() >> 11) * (1.0 / 9007199254740992.0)

    def choice(self, seq):
        return seq[self.below(len(seq))]

    @property
    def state(self) -> int:
        return self._state


def derive_seed(*parts: int) -> int:
    """Mix integer parts into one 64-bit seed.

    ``derive_seed(root, seed_index, episode_index)`` is how evaluation sub-seeds
    are produced; the mapping is order sensitive and has no global state.
    """
    h = 0x6A09E667F3BCC908
    for p in parts:
        h = _mix(((h ^ (int(p) & _MASK)) + _GOLDEN) & _MASK)
    return h

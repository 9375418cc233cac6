"""Deterministic uniform randomness for the simulator.

Streams are counter-based in the style of SplittableRandom/SplitMix64:
draw ``j`` of a stream is a pure function of the stream key and ``j``, so
a stream carries no hidden state beyond its draw counter, substreams are
derived by key mixing, and every (seed, substream path, counter) triple
maps to the same double on every platform.  The compiled kernel
re-implements the same arithmetic in C; ``tests/test_kernels.py`` pins the
two implementations against each other.

Statistical quality is ample for sampling measurement outcomes.  This is
not a cryptographic generator.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15  # golden-ratio increment
_SPLIT_SALT = 0x5851F42D4C957F2D  # decorrelates child keys from parent draws


def mix64(z: int) -> int:
    """SplitMix64 finalizer: a 64-bit bijection with strong avalanche."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def root_key(seed: int) -> int:
    """Key of the top-level stream for a user-facing seed."""
    return mix64(seed & _MASK64)


def child_key(key: int, index: int) -> int:
    """Key of substream ``index`` of the stream with key ``key``."""
    return mix64(((key ^ _SPLIT_SALT) + ((index + 1) * _GAMMA)) & _MASK64)


def uniform_at(key: int, counter: int) -> float:
    """Draw ``counter`` (1-based) of the stream with key ``key``, in [0, 1)."""
    return (mix64((key + counter * _GAMMA) & _MASK64) >> 11) * 2.0**-53


class RandomStream:
    """A splittable stream of uniform doubles.

    ``uniform()`` advances the draw counter; ``substream(i)`` derives an
    independent stream without disturbing this one.  Streams created from
    the same seed and substream path always produce the same sequence.
    """

    __slots__ = ("seed", "key", "_count")

    def __init__(self, seed: int, _key: int | None = None):
        self.seed = int(seed)
        self.key = root_key(self.seed) if _key is None else _key
        self._count = 0

    def uniform(self) -> float:
        """Next double in [0, 1)."""
        self._count += 1
        return uniform_at(self.key, self._count)

    def substream(self, index: int) -> "RandomStream":
        """Independent stream keyed by ``index``; this stream is unaffected."""
        return RandomStream(self.seed, _key=child_key(self.key, index))

    def __repr__(self) -> str:
        return f"RandomStream(seed={self.seed}, key={self.key:#x}, drawn={self._count})"

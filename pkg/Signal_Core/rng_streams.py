# rng_streams.py
import hashlib
from typing import Optional, Tuple

import numpy as np

from Signal_Core.errors import ConfigurationError

_SEED_LIMIT = 2**64


def _label_key(label: str) -> int:
    """Stable 32-bit key for a stream label (independent of PYTHONHASHSEED)."""
    digest = hashlib.blake2b(label.encode("utf-8"), digest_size=4).digest()
    return int.from_bytes(digest, "little")


class RngStream:
    """
    Seeded, labelled random stream.

    A stream is identified by its seed and the chain of labels it was forked
    through. Identical (seed, label chain) always yields the identical PCG64
    integer sequence. Each instance owns one generator and is meant to have a
    single consumer; fork a child for every independent purpose.
    """

    __slots__ = ("seed", "stream_label", "_path", "_generator")

    def __init__(self, seed: int, stream_label: str = "root", _path: Optional[Tuple[int, ...]] = None):
        if not isinstance(seed, (int, np.integer)) or not 0 <= int(seed) < _SEED_LIMIT:
            raise ConfigurationError(f"seed must be an unsigned 64-bit integer, got {seed!r}")
        self.seed = int(seed)
        self.stream_label = stream_label
        # root streams start their path at their own label
        self._path = (_label_key(stream_label),) if _path is None else tuple(_path)
        self._generator: Optional[np.random.Generator] = None

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, stream_label={self.stream_label!r})"

    def fork(self, label: str) -> "RngStream":
        return RngStream(
            self.seed,
            f"{self.stream_label}/{label}",
            self._path + (_label_key(label),),
        )

    @property
    def generator(self) -> np.random.Generator:
        if self._generator is None:
            seq = np.random.SeedSequence(self.seed, spawn_key=self._path)
            self._generator = np.random.Generator(np.random.PCG64(seq))
        return self._generator

    # Convenience draws used across the simulator

    def standard_normal(self, n: int) -> np.ndarray:
        return self.generator.standard_normal(n)

    def complex_normal(self, n: int, power: float = 1.0) -> np.ndarray:
        """Circularly-symmetric complex Gaussian samples with E|z|^2 = power."""
        scale = np.sqrt(power / 2.0)
        draws = self.generator.standard_normal((n, 2))
        return scale * (draws[:, 0] + 1j * draws[:, 1])

    def uniform(self, low: float, high: float, n: Optional[int] = None):
        return self.generator.uniform(low, high, n)

    def bits(self, n: int) -> np.ndarray:
        return self.generator.integers(0, 2, size=n, dtype=np.uint8)

    def integers(self, n: int) -> np.ndarray:
        """Raw 64-bit generator output, for reproducibility checks."""
        return self.generator.bit_generator.random_raw(n)


def rng_fork(parent: RngStream, label: str) -> RngStream:
    return parent.fork(label)

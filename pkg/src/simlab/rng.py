"""Counter-based splittable random streams.

A stream is keyed by ``(seed, stream_id)`` and drives a Philox-4x64 bit
generator. Draw ``k`` of a stream is always the ``k``-th 64-bit output of
that keyed generator, whether it was fetched one at a time or in a batch.
Uniforms use the top 53 bits, so they lie on the grid ``j / 2**53`` in
``[0, 1)``.

Substreams are derived with a pairing function that is a bijection between
pairs of naturals and positive integers. Distinct ``(parent, index)`` pairs
therefore never collide, and no child can share the root id ``0``.
"""
from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .errors import ConfigError

__all__ = [
    "RandomStream",
    "FixedStream",
    "next_uniform",
    "uniform_on",
    "spawn_substream",
    "substream_id",
]

_U64 = 2**64
_BLOCK = 4096


def _check_u64(name: str, value: int) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise ConfigError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if not 0 <= value < _U64:
        raise ConfigError(f"{name} must fit in 64 unsigned bits, got {value}")
    return value


def substream_id(parent: int, index: int) -> int:
    """Child stream id for worker ``index`` of stream ``parent``.

    Uses Szudzik's pairing shifted by one, an injection from N x N into the
    positive integers. Raises if the result no longer fits in 64 bits.
    """
    parent = _check_u64("stream_id", parent)
    index = _check_u64("worker_index", index)
    if parent < index:
        paired = index * index + parent
    else:
        paired = parent * parent + parent + index
    child = paired + 1
    if child >= _U64:
        raise ConfigError(
            f"substream id overflow for parent={parent}, index={index}; "
            "nest fewer levels or use smaller worker indices"
        )
    return child


class RandomStream:
    """Reproducible uniform source keyed by ``(seed, stream_id)``.

    Parameters
    ----------
    seed : int
        Root seed, 64-bit unsigned.
    stream_id : int
        Stream identifier, 64-bit unsigned. Use :meth:`spawn` rather than
        picking ids by hand when streams must be independent of each other.
    """

    def __init__(self, seed: int = 0, stream_id: int = 0):
        self._seed = _check_u64("seed", seed)
        self._stream_id = _check_u64("stream_id", stream_id)
        key = self._seed | (self._stream_id << 64)
        self._gen = np.random.Generator(np.random.Philox(key=key))
        self._buf = np.empty(0)
        self._pos = 0
        self._counter = 0

    @property
    def seed(self) -> int:
        return self._seed

    @property
    def stream_id(self) -> int:
        return self._stream_id

    @property
    def counter(self) -> int:
        """Number of uniforms consumed so far."""
        return self._counter

    def __repr__(self) -> str:
        return (
            f"RandomStream(seed={self._seed}, stream_id={self._stream_id}, "
            f"counter={self._counter})"
        )

    def next_uniform(self) -> float:
        if self._pos >= self._buf.size:
            self._buf = self._gen.random(_BLOCK)
            self._pos = 0
        u = float(self._buf[self._pos])
        self._pos += 1
        self._counter += 1
        return u

    def uniforms(self, n: int) -> np.ndarray:
        """Next ``n`` uniforms as an array, in draw order."""
        n = int(n)
        if n < 0:
            raise ConfigError(f"n must be non-negative, got {n}")
        avail = self._buf.size - self._pos
        if n <= avail:
            out = self._buf[self._pos:self._pos + n].copy()
            self._pos += n
        else:
            head = self._buf[self._pos:]
            out = np.concatenate([head, self._gen.random(n - avail)])
            self._buf = np.empty(0)
            self._pos = 0
        self._counter += n
        return out

    def uniform_on(self, a: float, b: float) -> float:
        if not (math.isfinite(a) and math.isfinite(b)) or a >= b:
            raise ConfigError(f"uniform_on needs finite a < b, got a={a}, b={b}")
        x = a + (b - a) * self.next_uniform()
        # rounding can land on b for narrow intervals
        return x if x < b else math.nextafter(b, a)

    def spawn(self, worker_index: int) -> "RandomStream":
        """Independent child stream for ``worker_index``."""
        return RandomStream(self._seed, substream_id(self._stream_id, worker_index))


class FixedStream:
    """Replays a fixed list of uniforms; used for hand-checked examples.

    Raises ``IndexError`` once the list is exhausted so a test can't silently
    consume more randomness than it declared.
    """

    def __init__(self, values: Sequence[float]):
        vals = np.asarray(values, dtype=float)
        if vals.ndim != 1 or np.any((vals < 0) | (vals >= 1)):
            raise ConfigError("FixedStream values must be a 1-d sequence in [0, 1)")
        self._vals = vals
        self._counter = 0

    @property
    def counter(self) -> int:
        return self._counter

    def next_uniform(self) -> float:
        if self._counter >= self._vals.size:
            raise IndexError("FixedStream exhausted")
        u = float(self._vals[self._counter])
        self._counter += 1
        return u

    def uniforms(self, n: int) -> np.ndarray:
        if self._counter + n > self._vals.size:
            raise IndexError("FixedStream exhausted")
        out = self._vals[self._counter:self._counter + n].copy()
        self._counter += n
        return out

    def uniform_on(self, a: float, b: float) -> float:
        if a >= b:
            raise ConfigError(f"uniform_on needs a < b, got a={a}, b={b}")
        x = a + (b - a) * self.next_uniform()
        return x if x < b else math.nextafter(b, a)


def next_uniform(stream: RandomStream) -> float:
    return stream.next_uniform()


def uniform_on(stream: RandomStream, a: float, b: float) -> float:
    return stream.uniform_on(a, b)


def spawn_substream(stream: RandomStream, worker_index: int) -> RandomStream:
    return stream.spawn(worker_index)

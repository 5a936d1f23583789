"""Point-based under-approximation of Lipschitz constants.

Samplers produce deterministic points in the half-open unit cube [0,1)^d:

* ``random``: numpy's PCG64 generator with an explicit seed;
* ``halton``: coordinate k of point j is the radical inverse of j+1 in the
  k-th prime base;
* ``sobol``: the classic 32-bit Gray-code construction driven by the shipped
  Joe-Kuo direction-number table (dimensions 2..1111; dimension 1 is the van
  der Corput sequence).  Generation starts at index 1, so the first point is
  (0.5, ..., 0.5) and the origin corner of the flow box is never sampled.

The table file is integrity-checked against a pinned SHA-256 before use.

Estimates are running maxima over sample prefixes, so they are nondecreasing
in the sample count and identical for any block size or parallel schedule.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Iterator

import numpy as np

from .bounds import FlowBox
from .estimates import METHOD_POINT_LOWER, MODE_MAX, MODE_SQRT, LipschitzEstimate
from .errors import DimensionTooLarge
from .network import Network, jacobian_diag_batch

KIND_RANDOM = "random"
KIND_HALTON = "halton"
KIND_SOBOL = "sobol"
SAMPLER_KINDS = (KIND_RANDOM, KIND_HALTON, KIND_SOBOL)

_DIRECTIONS_FILE = "joe_kuo_6_1111.txt"
_DIRECTIONS_SHA256 = "2afb7368f5ad2b6ab11ad628f3c44c2fa68914bb2fe2c3987b5164c3a782501c"
_SOBOL_BITS = 32
_DEFAULT_BLOCK = 8192


def _first_primes(count: int) -> list[int]:
    primes: list[int] = []
    candidate = 2
    while len(primes) < count:
        if all(candidate % p for p in primes if p * p <= candidate):
            primes.append(candidate)
        candidate += 1
    return primes


def _load_direction_table() -> list[tuple[int, int, list[int]]]:
    data = resources.files("wdn_lipschitz.data").joinpath(_DIRECTIONS_FILE).read_bytes()
    digest = hashlib.sha256(data).hexdigest()
    if digest != _DIRECTIONS_SHA256:
        raise RuntimeError(
            f"direction-number table checksum mismatch: {digest} != {_DIRECTIONS_SHA256}"
        )
    rows = []
    lines = data.decode("ascii").splitlines()
    for line in lines[1:]:
        fields = line.split()
        if not fields:
            continue
        s, a = int(fields[1]), int(fields[2])
        m = [int(tok) for tok in fields[3:]]
        if len(m) != s:
            raise RuntimeError("corrupt direction-number row")
        rows.append((s, a, m))
    return rows


@lru_cache(maxsize=None)
def _direction_rows() -> tuple[tuple[int, int, tuple[int, ...]], ...]:
    return tuple((s, a, tuple(m)) for s, a, m in _load_direction_table())


def sobol_max_dimension() -> int:
    return len(_direction_rows()) + 1


def _sobol_matrix(dim: int) -> np.ndarray:
    """Direction numbers as a (bits, dim) uint64 matrix of 32-bit integers."""
    rows = _direction_rows()
    if dim > len(rows) + 1:
        raise DimensionTooLarge(dim, len(rows) + 1)
    v = np.zeros((_SOBOL_BITS, dim), dtype=np.uint64)
    # dimension 1: van der Corput in base 2
    for k in range(_SOBOL_BITS):
        v[k, 0] = 1 << (_SOBOL_BITS - 1 - k)
    for j in range(1, dim):
        s, a, m = rows[j - 1]
        col = [0] * _SOBOL_BITS
        for k in range(min(s, _SOBOL_BITS)):
            col[k] = m[k] << (_SOBOL_BITS - 1 - k)
        for k in range(s, _SOBOL_BITS):
            acc = col[k - s] ^ (col[k - s] >> s)
            for i in range(1, s):
                if (a >> (s - 1 - i)) & 1:
                    acc ^= col[k - i]
            col[k] = acc
        v[:, j] = col
    return v


def _sobol_blocks(dim: int, count: int, block: int) -> Iterator[np.ndarray]:
    if count >= 2 ** _SOBOL_BITS:
        raise ValueError(f"at most {2 ** _SOBOL_BITS - 1} Sobol points supported")
    v = _sobol_matrix(dim)
    state = np.zeros(dim, dtype=np.uint64)
    scale = 0.5 ** _SOBOL_BITS
    done = 0
    index = 0
    while done < count:
        size = min(block, count - done)
        out = np.empty((size, dim))
        for row in range(size):
            index += 1
            level = (index & -index).bit_length() - 1
            state ^= v[level]
            out[row] = state
        out *= scale
        yield out
        done += size


def _halton_blocks(dim: int, count: int, block: int) -> Iterator[np.ndarray]:
    bases = _first_primes(dim)
    done = 0
    while done < count:
        size = min(block, count - done)
        idx0 = np.arange(done + 1, done + size + 1, dtype=np.int64)
        out = np.empty((size, dim))
        for k, base in enumerate(bases):
            idx = idx0.copy()
            r = np.zeros(size)
            f = 1.0
            while idx.any():
                f /= base
                r += (idx % base) * f
                idx //= base
            out[:, k] = r
        yield out
        done += size


def _random_blocks(dim: int, count: int, block: int, seed: int) -> Iterator[np.ndarray]:
    rng = np.random.Generator(np.random.PCG64(seed))
    done = 0
    while done < count:
        size = min(block, count - done)
        yield rng.random((size, dim))
        done += size


@dataclass(frozen=True)
class SampleSequence:
    """Deterministic point source in [0,1)^dimension."""

    kind: str
    dimension: int
    seed: int = 0

    def __post_init__(self):
        if self.kind not in SAMPLER_KINDS:
            raise ValueError(f"unknown sampler kind {self.kind!r}")
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")
        if self.kind == KIND_SOBOL and self.dimension > sobol_max_dimension():
            raise DimensionTooLarge(self.dimension, sobol_max_dimension())

    def blocks(self, count: int, block: int = _DEFAULT_BLOCK) -> Iterator[np.ndarray]:
        if count < 0:
            raise ValueError("count must be >= 0")
        if self.kind == KIND_SOBOL:
            return _sobol_blocks(self.dimension, count, block)
        if self.kind == KIND_HALTON:
            return _halton_blocks(self.dimension, count, block)
        return _random_blocks(self.dimension, count, block, self.seed)

    def points(self, count: int) -> np.ndarray:
        parts = list(self.blocks(count))
        if not parts:
            return np.empty((0, self.dimension))
        return np.concatenate(parts, axis=0)


def halton(dimension: int, count: int) -> np.ndarray:
    """First count Halton points in the given dimension."""
    return SampleSequence(KIND_HALTON, dimension).points(count)


def sobol(dimension: int, count: int) -> np.ndarray:
    """First count Sobol points (index-1 start: the first point is all 0.5)."""
    return SampleSequence(KIND_SOBOL, dimension).points(count)


def random_points(dimension: int, count: int, seed: int) -> np.ndarray:
    """count i.i.d. uniform points from a seeded PCG64 generator."""
    return SampleSequence(KIND_RANDOM, dimension, seed).points(count)


def _scale_into_box(points: np.ndarray, box: FlowBox) -> np.ndarray:
    q = box.lo + points * (box.hi - box.lo)
    # guard against rounding drifting past an endpoint
    np.clip(q, box.lo, box.hi, out=q)
    return q


def k_lower(net: Network, box: FlowBox, sampler: str | SampleSequence, n: int,
            mode: str = MODE_MAX, seed: int = 0,
            block: int = _DEFAULT_BLOCK) -> LipschitzEstimate:
    """Best objective value over n sampled flow points (an under-estimate)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    estimate, _ = k_lower_trace(net, box, sampler, n, mode=mode, seed=seed,
                                block=block, checkpoints=())
    return estimate


def k_lower_trace(
    net: Network,
    box: FlowBox,
    sampler: str | SampleSequence,
    n: int,
    mode: str = MODE_MAX,
    seed: int = 0,
    block: int = _DEFAULT_BLOCK,
    checkpoints: tuple[int, ...] = (),
) -> tuple[LipschitzEstimate, list[tuple[int, float]]]:
    """k_lower plus the running estimate at each requested prefix length.

    A checkpoint at m equals an independent run with n=m because the
    estimate is a prefix maximum of a deterministic sequence.
    """
    if mode not in (MODE_MAX, MODE_SQRT):
        raise ValueError(f"unknown mode {mode!r}")
    if isinstance(sampler, str):
        sampler = SampleSequence(sampler, net.n_links, seed)
    elif sampler.dimension != net.n_links:
        raise ValueError("sampler dimension does not match the network")

    pending = sorted(c for c in checkpoints if 1 <= c <= n)
    next_mark = 0
    trace: list[tuple[int, float]] = []
    best_raw = 0.0
    seen = 0
    for points in sampler.blocks(n, block):
        q = _scale_into_box(points, box)
        g = jacobian_diag_batch(net, q)
        if mode == MODE_MAX:
            per_point = g.max(axis=1)
        else:
            per_point = np.einsum("ij,ij->i", g, g)
        running = np.maximum.accumulate(per_point)
        while next_mark < len(pending) and pending[next_mark] <= seen + len(per_point):
            at = pending[next_mark]
            next_mark += 1
            value = max(best_raw, float(running[at - seen - 1]))
            trace.append((at, math.sqrt(value) if mode == MODE_SQRT else value))
        best_raw = max(best_raw, float(running[-1]))
        seen += len(per_point)
    value = math.sqrt(best_raw) if mode == MODE_SQRT else best_raw
    estimate = LipschitzEstimate(
        value=value,
        method=METHOD_POINT_LOWER,
        mode=mode,
        effort=n,
    )
    return estimate, trace

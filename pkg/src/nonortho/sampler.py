"""Born-rule measurement in the {|alpha>|p,q>} basis and coupon-collector decoding.

Each measurement is taken on a freshly prepared copy of the output state, so
repeated draws are independent. Decoding stops as soon as every subspace has
produced a click.
"""
from __future__ import annotations

import logging
import math
from bisect import bisect_right
from dataclasses import dataclass, field
from itertools import accumulate
from typing import Iterator, Sequence

import numpy as np

from .codec import BasisIndex, BitString, Codeword, StateVector, decode_codeword
from .errors import DecodingError

__all__ = [
    "RandomSource",
    "MeasurementSample",
    "DecoderState",
    "TrialRecord",
    "measure",
    "collect_until_complete",
    "reconstruct",
    "expected_runs",
    "default_max_runs",
    "derive_seed",
    "run_trials",
]

log = logging.getLogger(__name__)

MEASURE_NORM_ATOL = 1e-8
_BUFFER = 64


class RandomSource:
    """Seeded uniform stream backed by numpy's PCG64.

    Uniforms are drawn in blocks; PCG64 doubles come out identically whether
    drawn singly or in blocks, so the stream depends only on the seed.
    """

    def __init__(self, seed: int):
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF
        self._gen = np.random.Generator(np.random.PCG64(self.seed))
        self._buf: list[float] = []
        self._pos = 0
        self.draws = 0

    def uniform(self) -> float:
        if self._pos == len(self._buf):
            self._buf = self._gen.random(_BUFFER).tolist()
            self._pos = 0
        u = self._buf[self._pos]
        self._pos += 1
        self.draws += 1
        return u

    def __repr__(self) -> str:
        return f"RandomSource(seed={self.seed}, draws={self.draws})"


def derive_seed(master: int, index: int) -> int:
    """64-bit seed for trial ``index`` under ``master``, independent of scheduling."""
    ss = np.random.SeedSequence([int(master) & 0xFFFFFFFFFFFFFFFF, int(index)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class MeasurementSample:
    basis: BasisIndex
    trial_index: int


@dataclass
class DecoderState:
    n: int
    collected: dict[int, tuple[int, int]] = field(default_factory=dict)
    runs: int = 0
    conflict: bool = False

    @property
    def complete(self) -> bool:
        return len(self.collected) == self.n

    def record(self, b: BasisIndex) -> None:
        self.runs += 1
        seen = self.collected.get(b.alpha)
        if seen is None:
            self.collected[b.alpha] = (b.p, b.q)
        elif seen != (b.p, b.q):
            self.conflict = True


def _cdf(probs: Sequence[float]) -> list[float]:
    return list(accumulate(probs))


def _draw(cdf: list[float], u: float) -> int:
    i = bisect_right(cdf, u * cdf[-1])
    if i == len(cdf):
        # u * total landed on the last edge through rounding
        i = max(j for j in range(len(cdf)) if j == 0 or cdf[j] > cdf[j - 1])
    return i


def _born_table(v: StateVector | np.ndarray) -> list[float]:
    amps = v.amplitudes if isinstance(v, StateVector) else np.asarray(v, dtype=complex).reshape(-1)
    probs = np.abs(amps) ** 2
    total = float(probs.sum())
    if abs(total - 1.0) > MEASURE_NORM_ATOL:
        raise ValueError(f"cannot measure an unnormalised state (squared norm {total!r})")
    return probs.tolist()


def measure(v: StateVector | np.ndarray, rng: RandomSource) -> MeasurementSample:
    """Draw one basis state with probability |amplitude|**2 (inverse CDF)."""
    cdf = _cdf(_born_table(v))
    i = _draw(cdf, rng.uniform())
    return MeasurementSample(BasisIndex.from_flat(i), rng.draws)


def expected_runs(n: int) -> float:
    """n * H_n, the mean number of draws to see all n subspaces."""
    if n < 1:
        raise ValueError("n must be positive")
    return n * math.fsum(1 / k for k in range(1, n + 1))


def default_max_runs(n: int) -> int:
    return math.ceil(50 * expected_runs(n))


def collect_until_complete(
    v: StateVector | np.ndarray,
    n: int,
    rng: RandomSource,
    max_runs: int | None = None,
) -> DecoderState:
    """Measure fresh copies of ``v`` until all n subspaces have clicked.

    Stops early on a conflict (two different pairs in one subspace, which a
    codeword state can never produce) or after ``max_runs`` draws. The draw
    sequence is exactly that of repeated :func:`measure` calls.
    """
    if max_runs is None:
        max_runs = default_max_runs(n)
    if max_runs < 1:
        raise ValueError("max_runs must be positive")
    probs = _born_table(v)
    if len(probs) != 4 * n:
        raise ValueError(f"state dimension {len(probs)} does not match n={n}")
    cdf = _cdf(probs)
    state = DecoderState(n)
    collected = state.collected
    while state.runs < max_runs:
        i = _draw(cdf, rng.uniform())
        state.record(BasisIndex.from_flat(i))
        if state.conflict or len(collected) == n:
            break
    if not state.complete and not state.conflict:
        log.warning("decoding incomplete after %d runs (n=%d, %d subspaces seen)", state.runs, n, len(collected))
    return state


def reconstruct(d: DecoderState) -> BitString:
    if d.conflict:
        raise DecodingError("conflicting clicks: measured state was not a codeword")
    if not d.complete:
        missing = sorted(set(range(d.n)) - set(d.collected))
        raise DecodingError(f"incomplete record after {d.runs} runs; missing alpha {missing}")
    return decode_codeword(Codeword(tuple(d.collected[a] for a in range(d.n))))


@dataclass(frozen=True)
class TrialRecord:
    n: int
    seed: int
    runs: int
    completed: bool
    conflict: bool

    CSV_HEADER = ("n", "seed", "runs", "completed", "conflict")

    def csv_row(self) -> tuple:
        return (self.n, self.seed, self.runs, int(self.completed), int(self.conflict))


def run_trials(
    v: StateVector,
    trials: int,
    master_seed: int,
    max_runs: int | None = None,
    start: int = 0,
) -> Iterator[TrialRecord]:
    """Independent decoding trials; trial i uses ``derive_seed(master_seed, i)``."""
    n = v.n
    for i in range(start, start + trials):
        seed = derive_seed(master_seed, i)
        d = collect_until_complete(v, n, RandomSource(seed), max_runs)
        yield TrialRecord(n, seed, d.runs, d.complete, d.conflict)

"""Oracles, inversion about the average, and the two search engines.

All operators on the 4n-dimensional space are applied as rank-one or diagonal
updates; no 4n x 4n matrix is ever built. The standard engine works on the
full 2**(2n)-dimensional register and exists only for comparison.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Union

import numpy as np

from .codec import BasisIndex, Codeword, StateVector, build_list, decode_codeword, inner
from .errors import GuardError

__all__ = [
    "ReflectionAboutCodeword",
    "DiagonalSignFlip",
    "OracleSpec",
    "make_oracle",
    "oracle_apply",
    "diffusion_apply",
    "grover_step",
    "single_shot_search",
    "search_report",
    "StandardSearchProblem",
    "StandardSearchResult",
    "standard_optimal_iterations",
    "standard_success_law",
    "standard_grover_search",
    "MAX_STANDARD_BITS",
]

MAX_STANDARD_BITS = 16


@dataclass(frozen=True)
class ReflectionAboutCodeword:
    """Id - 2|l_s><l_s|."""

    target: Codeword

    variant = "reflection"

    @property
    def n(self) -> int:
        return self.target.n


@dataclass(frozen=True)
class DiagonalSignFlip:
    """Phase flip on each basis state in ``targets``."""

    n: int
    targets: frozenset[BasisIndex]

    variant = "diagonal"

    def __post_init__(self):
        targets = frozenset(BasisIndex(*t) for t in self.targets)
        for t in targets:
            if not 0 <= t.alpha < self.n:
                raise ValueError(f"target {t} outside n={self.n}")
        object.__setattr__(self, "targets", targets)

    @classmethod
    def from_codeword(cls, s: Codeword) -> "DiagonalSignFlip":
        return cls(s.n, frozenset(s.support))


OracleSpec = Union[ReflectionAboutCodeword, DiagonalSignFlip]


def make_oracle(s: Codeword, variant: Literal["reflection", "diagonal"] = "reflection") -> OracleSpec:
    if variant == "reflection":
        return ReflectionAboutCodeword(s)
    if variant == "diagonal":
        return DiagonalSignFlip.from_codeword(s)
    raise ValueError(f"unknown oracle variant {variant!r}")


def _check_dim(n: int, v: StateVector) -> None:
    if v.n != n:
        raise ValueError(f"dimension mismatch: operator on n={n}, state has n={v.n}")


def oracle_apply(o: OracleSpec, v: StateVector) -> StateVector:
    _check_dim(o.n, v)
    out = v.amplitudes.copy()
    if isinstance(o, ReflectionAboutCodeword):
        idx = [b.flat for b in o.target.support]
        # <l_s|v> |l_s> restricted to the support is sum(v[S]) / n on each entry
        out[idx] -= 2 * out[idx].sum() / o.n
    elif isinstance(o, DiagonalSignFlip):
        idx = [b.flat for b in o.targets]
        out[idx] = -out[idx]
    else:
        raise TypeError(f"not an oracle: {o!r}")
    return StateVector(out)


def diffusion_apply(n: int, v: StateVector) -> StateVector:
    """Return 2<L|v>|L> - v, i.e. reflect every amplitude about the mean."""
    _check_dim(n, v)
    a = v.amplitudes
    return StateVector(2 * a.mean() - a)


def grover_step(o: OracleSpec, v: StateVector) -> StateVector:
    """One application of the search operator: oracle first, then diffusion."""
    return diffusion_apply(o.n, oracle_apply(o, v))


def single_shot_search(n: int, s: Codeword, variant: str = "reflection") -> StateVector:
    if s.n != n:
        raise ValueError(f"codeword has n={s.n}, expected {n}")
    return grover_step(make_oracle(s, variant), build_list(n))


def search_report(s: Codeword, out: StateVector, variant: str, queries: int = 1) -> dict:
    return {
        "n": s.n,
        "target": str(decode_codeword(s)),
        "fidelity": abs(inner(s, out)) ** 2,
        "oracle_variant": variant,
        "queries": queries,
    }


@dataclass(frozen=True)
class StandardSearchProblem:
    """Search for ``targets`` among all integers on ``num_bits`` orthogonally-encoded qubits."""

    num_bits: int
    targets: frozenset[int] = field()

    def __post_init__(self):
        if self.num_bits < 1:
            raise ValueError("num_bits must be positive")
        targets = frozenset(int(t) for t in self.targets)
        if not targets:
            raise ValueError("at least one target is required")
        bad = [t for t in targets if not 0 <= t < self.size]
        if bad:
            raise ValueError(f"targets out of range [0, {self.size}): {sorted(bad)}")
        object.__setattr__(self, "targets", targets)

    @property
    def size(self) -> int:
        return 2 ** self.num_bits


@dataclass(frozen=True)
class StandardSearchResult:
    state: np.ndarray
    iterations: int
    success_probability: float


def standard_optimal_iterations(N: int, M: int) -> int:
    """floor(pi / (4 theta)) with sin(theta) = sqrt(M/N)."""
    if not 1 <= M <= N:
        raise ValueError(f"need 1 <= M <= N, got M={M}, N={N}")
    theta = math.asin(math.sqrt(M / N))
    return math.floor(math.pi / (4 * theta))


def standard_success_law(N: int, M: int, k: int) -> float:
    theta = math.asin(math.sqrt(M / N))
    return math.sin((2 * k + 1) * theta) ** 2


def standard_grover_search(p: StandardSearchProblem, iterations: int | None = None) -> StandardSearchResult:
    """Run textbook Grover iterations on the dense 2**num_bits register.

    With ``iterations=None`` the optimal count from
    :func:`standard_optimal_iterations` is used.
    """
    if p.num_bits > MAX_STANDARD_BITS:
        raise GuardError(f"standard baseline limited to {MAX_STANDARD_BITS} bits, got {p.num_bits}")
    N, M = p.size, len(p.targets)
    k = standard_optimal_iterations(N, M) if iterations is None else int(iterations)
    if k < 0:
        raise ValueError("iterations must be non-negative")
    idx = np.fromiter(sorted(p.targets), dtype=np.int64)
    psi = np.full(N, 1 / math.sqrt(N))
    for _ in range(k):
        psi[idx] = -psi[idx]
        psi = 2 * psi.mean() - psi
    # |<J|psi>|^2 with |J> the uniform superposition of the targets
    prob = float(psi[idx].sum() ** 2 / M)
    return StandardSearchResult(psi, k, prob)

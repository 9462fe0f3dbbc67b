"""Non-orthogonal encoding of 2n-bit strings into a 4n-dimensional space.

The space is split into n four-dimensional subspaces labelled by ``alpha``.
A bit string is encoded as the uniform superposition of one basis state per
subspace; subspace ``alpha`` carries bits ``2*alpha`` and ``2*alpha + 1``.

Amplitudes are stored in a flat array indexed by ``4*alpha + 2*p + q``, so for
n = 2 the flat index coincides with the three-qubit label |alpha p q>.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, NamedTuple, Sequence, Union

import numpy as np

from .errors import GuardError

__all__ = [
    "BitString",
    "BasisIndex",
    "Codeword",
    "StateVector",
    "OrthogonalDecomposition",
    "pad_left",
    "encode",
    "decode_codeword",
    "all_codewords",
    "build_list",
    "list_normalization",
    "inner",
    "codeword_overlap",
    "orthogonal_complement",
    "codeword_multiplicity",
    "enumerate_decompositions",
    "to_json",
    "state_from_json",
    "codeword_from_json",
]

NORM_ATOL = 1e-10
LABELS: tuple[tuple[int, int], ...] = ((0, 0), (0, 1), (1, 0), (1, 1))
MAX_DECOMPOSITION_N = 4
MAX_ENUMERATION_N = 8


@dataclass(frozen=True)
class BitString:
    """An even-length string of classical bits."""

    bits: tuple[int, ...]

    def __post_init__(self):
        if not self.bits:
            raise ValueError("bit string must be nonempty")
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError(f"bits must be 0 or 1, got {self.bits!r}")
        if len(self.bits) % 2:
            raise ValueError(f"bit string length must be even, got {len(self.bits)}; use pad_left")

    @classmethod
    def parse(cls, text: str | Sequence[int] | "BitString") -> "BitString":
        if isinstance(text, BitString):
            return text
        return cls(_to_bits(text))

    @property
    def n(self) -> int:
        return len(self.bits) // 2

    def __len__(self) -> int:
        return len(self.bits)

    def __str__(self) -> str:
        return "".join(map(str, self.bits))


def _to_bits(text: str | Sequence[int]) -> tuple[int, ...]:
    if isinstance(text, str):
        text = text.strip()
        if any(c not in "01" for c in text):
            raise ValueError(f"invalid bit string {text!r}")
        return tuple(int(c) for c in text)
    return tuple(int(b) for b in text)


class BasisIndex(NamedTuple):
    alpha: int
    p: int
    q: int

    @property
    def flat(self) -> int:
        return 4 * self.alpha + 2 * self.p + self.q

    @classmethod
    def from_flat(cls, index: int) -> "BasisIndex":
        alpha, rem = divmod(int(index), 4)
        return cls(alpha, rem >> 1, rem & 1)


@dataclass(frozen=True)
class Codeword:
    """Encoded state |l_i>: one bit pair ``(p, q)`` for every subspace ``alpha``."""

    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if not self.pairs:
            raise ValueError("codeword needs at least one subspace")
        pairs = tuple((int(p), int(q)) for p, q in self.pairs)
        for pair in pairs:
            if pair not in LABELS:
                raise ValueError(f"invalid bit pair {pair!r}")
        object.__setattr__(self, "pairs", pairs)

    @property
    def n(self) -> int:
        return len(self.pairs)

    @property
    def support(self) -> tuple[BasisIndex, ...]:
        return tuple(BasisIndex(a, p, q) for a, (p, q) in enumerate(self.pairs))

    def to_state(self) -> "StateVector":
        amps = np.zeros(4 * self.n, dtype=complex)
        amps[[b.flat for b in self.support]] = 1 / math.sqrt(self.n)
        return StateVector(amps)

    def __str__(self) -> str:
        return str(decode_codeword(self))


class StateVector:
    """Normalised complex amplitudes over the 4n basis states.

    Instances are read-only; the amplitude array is copied and frozen on
    construction.
    """

    __slots__ = ("_amps",)

    def __init__(self, amplitudes: Iterable[complex] | np.ndarray, *, atol: float = NORM_ATOL):
        amps = np.array(amplitudes, dtype=complex).reshape(-1)
        if amps.size == 0 or amps.size % 4:
            raise ValueError(f"state dimension must be a positive multiple of 4, got {amps.size}")
        norm2 = float(np.vdot(amps, amps).real)
        if abs(norm2 - 1.0) > atol:
            raise ValueError(f"state is not normalised (squared norm {norm2!r})")
        amps.setflags(write=False)
        self._amps = amps

    @property
    def amplitudes(self) -> np.ndarray:
        return self._amps

    @property
    def n(self) -> int:
        return self._amps.size // 4

    @property
    def dim(self) -> int:
        return self._amps.size

    def __getitem__(self, b: BasisIndex | tuple[int, int, int]) -> complex:
        return complex(self._amps[BasisIndex(*b).flat])

    def probabilities(self) -> np.ndarray:
        return np.abs(self._amps) ** 2

    def allclose(self, other: "StateVector | Codeword", atol: float = NORM_ATOL) -> bool:
        other = _as_state(other)
        return other.dim == self.dim and bool(np.allclose(self._amps, other._amps, rtol=0, atol=atol))

    def __repr__(self) -> str:
        nz = {tuple(BasisIndex.from_flat(i)): complex(a) for i, a in enumerate(self._amps) if a != 0}
        return f"StateVector(n={self.n}, nonzero={nz})"


StateLike = Union[StateVector, Codeword]


def _as_state(x: StateLike) -> StateVector:
    return x.to_state() if isinstance(x, Codeword) else x


@dataclass(frozen=True)
class OrthogonalDecomposition:
    """Four mutually orthogonal codewords whose equal superposition is the list."""

    members: tuple[Codeword, Codeword, Codeword, Codeword]

    def __post_init__(self):
        if len(self.members) != 4:
            raise ValueError("a decomposition has exactly four members")
        ns = {m.n for m in self.members}
        if len(ns) != 1:
            raise ValueError("members must share n")
        for alpha in range(self.n):
            if len({m.pairs[alpha] for m in self.members}) != 4:
                raise ValueError(f"members do not partition subspace alpha={alpha}")

    @property
    def n(self) -> int:
        return self.members[0].n

    def superposition(self) -> StateVector:
        """Return (1/2) * sum of members."""
        return StateVector(sum(m.to_state().amplitudes for m in self.members) / 2)

    def bitstrings(self) -> tuple[str, ...]:
        return tuple(str(m) for m in self.members)


def pad_left(bits: str | Sequence[int]) -> BitString:
    """Prepend a single 0 to an odd-length bit sequence."""
    seq = _to_bits(bits)
    if not seq:
        raise ValueError("bit sequence must be nonempty")
    if len(seq) % 2 == 0:
        raise ValueError(f"pad_left expects odd length, got {len(seq)}")
    return BitString((0,) + seq)


def encode(bits: BitString | str | Sequence[int]) -> Codeword:
    """Map bits (b0 b1 b2 b3 ...) to the codeword with pair alpha = (b[2a], b[2a+1])."""
    b = BitString.parse(bits).bits
    return Codeword(tuple((b[2 * a], b[2 * a + 1]) for a in range(len(b) // 2)))


def decode_codeword(cw: Codeword) -> BitString:
    return BitString(tuple(bit for pair in cw.pairs for bit in pair))


def all_codewords(n: int) -> Iterator[Codeword]:
    """Yield all 4**n codewords in increasing order of the encoded integer."""
    _check_n(n)
    for pairs in itertools.product(LABELS, repeat=n):
        yield Codeword(pairs)


def build_list(n: int) -> StateVector:
    """Uniform superposition over all 4n basis states."""
    _check_n(n)
    return StateVector(np.full(4 * n, 1 / math.sqrt(4 * n), dtype=complex))


def list_normalization(n: int) -> int:
    """Squared norm eta of the unnormalised sum of all 2**(2n) codeword vectors.

    Every basis state is covered by 4**(n-1) codewords with amplitude 1/sqrt(n),
    so eta = 4n * 16**(n-1) / n = 4**(2n-1).
    """
    _check_n(n)
    return 4 ** (2 * n - 1)


def inner(a: StateLike, b: StateLike) -> complex:
    """Hermitian inner product <a|b>."""
    va, vb = _as_state(a), _as_state(b)
    if va.n != vb.n:
        raise ValueError(f"mismatched n: {va.n} vs {vb.n}")
    return complex(np.vdot(va.amplitudes, vb.amplitudes))


def codeword_overlap(a: Codeword, b: Codeword) -> Fraction:
    """Exact <a|b> for two codewords: the fraction of subspaces where the pairs agree."""
    if a.n != b.n:
        raise ValueError(f"mismatched n: {a.n} vs {b.n}")
    return Fraction(sum(pa == pb for pa, pb in zip(a.pairs, b.pairs)), a.n)


def orthogonal_complement(s: Codeword) -> StateVector:
    """Uniform superposition over the 3n basis states outside the support of ``s``."""
    amps = np.full(4 * s.n, 1 / math.sqrt(3 * s.n), dtype=complex)
    amps[[b.flat for b in s.support]] = 0
    return StateVector(amps)


def codeword_multiplicity(b: BasisIndex | tuple[int, int, int], n: int) -> int:
    """Count codewords whose support contains ``b``, by enumeration."""
    b = BasisIndex(*b)
    _check_n(n)
    if not 0 <= b.alpha < n or b.p not in (0, 1) or b.q not in (0, 1):
        raise ValueError(f"{b} is not a basis state for n={n}")
    if n > MAX_ENUMERATION_N:
        raise GuardError(f"enumeration limited to n <= {MAX_ENUMERATION_N}")
    return sum(cw.pairs[b.alpha] == (b.p, b.q) for cw in all_codewords(n))


def enumerate_decompositions(n: int, containing: Codeword | None = None) -> list[OrthogonalDecomposition]:
    """Return every split of the list into four orthogonal codewords.

    Members are named by their pair in subspace 0; each further subspace assigns
    the four labels to the members by a permutation, giving 24**(n-1) splits.
    Output is sorted by the members' decoded strings.
    """
    _check_n(n)
    if n > MAX_DECOMPOSITION_N:
        raise GuardError(f"decomposition enumeration limited to n <= {MAX_DECOMPOSITION_N}")
    if containing is not None and containing.n != n:
        raise ValueError(f"codeword has n={containing.n}, expected {n}")
    perms = list(itertools.permutations(LABELS))
    found = []
    for choice in itertools.product(perms, repeat=n - 1):
        members = [
            Codeword((LABELS[j],) + tuple(perm[j] for perm in choice))
            for j in range(4)
        ]
        if containing is not None and containing not in members:
            continue
        members.sort(key=lambda m: m.pairs)
        found.append(OrthogonalDecomposition(tuple(members)))
    found.sort(key=lambda d: d.bitstrings())
    return found


def to_json(x: StateLike) -> dict:
    """Serialise a state or codeword, listing only nonzero amplitudes."""
    v = _as_state(x)
    entries = []
    for i, a in enumerate(v.amplitudes):
        if a != 0:
            b = BasisIndex.from_flat(i)
            entries.append({"alpha": b.alpha, "p": b.p, "q": b.q, "re": float(a.real), "im": float(a.imag)})
    return {"n": v.n, "amplitudes": entries}


def state_from_json(obj: dict) -> StateVector:
    n = int(obj["n"])
    _check_n(n)
    amps = np.zeros(4 * n, dtype=complex)
    for e in obj["amplitudes"]:
        b = BasisIndex(int(e["alpha"]), int(e["p"]), int(e["q"]))
        if not 0 <= b.alpha < n or b.p not in (0, 1) or b.q not in (0, 1):
            raise ValueError(f"basis entry {b} out of range for n={n}")
        amps[b.flat] = complex(e["re"], e.get("im", 0.0))
    return StateVector(amps)


def codeword_from_json(obj: dict, atol: float = NORM_ATOL) -> Codeword:
    """Recover a codeword, requiring amplitude 1/sqrt(n) on exactly one state per subspace."""
    v = state_from_json(obj)
    amps = v.amplitudes.reshape(v.n, 4)
    target = 1 / math.sqrt(v.n)
    pairs = []
    for alpha, row in enumerate(amps):
        hits = np.flatnonzero(np.abs(row) > atol)
        if hits.size != 1 or abs(row[hits[0]] - target) > atol:
            raise ValueError(f"state is not a codeword (subspace alpha={alpha})")
        pairs.append(LABELS[hits[0]])
    return Codeword(tuple(pairs))


def _check_n(n: int) -> None:
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")

"""Grover search over non-orthogonal entangled encodings of bit strings."""

__version__ = "0.1.0"

from .codec import (
    BasisIndex,
    BitString,
    Codeword,
    OrthogonalDecomposition,
    StateVector,
    build_list,
    decode_codeword,
    encode,
    inner,
    orthogonal_complement,
    pad_left,
)
from .errors import DecodingError, GuardError
from .grover import (
    DiagonalSignFlip,
    ReflectionAboutCodeword,
    diffusion_apply,
    grover_step,
    oracle_apply,
    single_shot_search,
)
from .sampler import RandomSource, collect_until_complete, expected_runs, measure, reconstruct

"""Exact rank experiments on integer matrices under rem/quo and p-adic digits."""

from .errors import (
    DomainError,
    InvalidModulusError,
    MalformedExpansionError,
    PadicLabError,
    ParseError,
    SamplingError,
    ShapeError,
    SizeError,
)
from .linalg import (
    RankResult,
    SmithDecomposition,
    det,
    rank_mod_p,
    rank_p_via_snf,
    rank_z,
    rank_z_oracle,
    smith_normal_form,
    snf_minor_gcd_oracle,
)
from .matrix import (
    IntMatrix,
    PAdicExpansion,
    mat_quo,
    mat_rem,
    matmul,
    outer,
    padic_expand,
    padic_reconstruct,
    parse_matrix,
    serialize_matrix,
    transpose,
)
from .rng import RngStream

__version__ = "0.1.0"

"""Structured matrix families and the random inputs the verifiers sample."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from math import comb
from typing import Sequence

from .errors import SamplingError, ShapeError, SizeError
from .linalg import det, rank_mod_p
from .matrix import IntMatrix, matmul, mat_rem, outer, transpose
from .primes import require_odd_prime, require_prime
from .rng import RngStream

MAX_CODE_BITS = 20
DEFAULT_MAX_ATTEMPTS = 10_000


@dataclass(frozen=True)
class BinaryCodeMatrix:
    """All binary r-tuples as rows, sorted by Hamming weight then value.

    Column 0 holds the most significant bit. ``row_blocks[w]`` is the range of
    row indices whose weight is ``w``.
    """

    r: int
    matrix: IntMatrix
    row_blocks: tuple[range, ...]


@dataclass(frozen=True)
class ColumnBlockPartition:
    """Columns of ``M = A A^T`` grouped by the size of their summing set.

    ``summing_sets[l]`` is the set of columns of ``A`` that add up to column
    ``l`` of ``M``; ``groups[k]`` lists the columns whose summing set has ``k``
    members.
    """

    groups: tuple[tuple[int, ...], ...]
    summing_sets: tuple[frozenset[int], ...]

    def column_for(self, subset) -> int:
        return self._index[frozenset(subset)]

    @cached_property
    def _index(self):
        return {s: l for l, s in enumerate(self.summing_sets)}


def binary_code_matrix(r: int) -> BinaryCodeMatrix:
    if not 1 <= r <= MAX_CODE_BITS:
        raise SizeError(f"binary code matrix needs 1 <= r <= {MAX_CODE_BITS}, got {r}")
    values = sorted(range(1 << r), key=lambda v: (bin(v).count("1"), v))
    rows = [[(v >> (r - 1 - j)) & 1 for j in range(r)] for v in values]
    blocks = []
    start = 0
    for w in range(r + 1):
        blocks.append(range(start, start + comb(r, w)))
        start += comb(r, w)
    return BinaryCodeMatrix(r, IntMatrix.from_rows(rows), tuple(blocks))


def gram(A: IntMatrix) -> IntMatrix:
    return matmul(A, transpose(A))


def summing_partition(code: BinaryCodeMatrix) -> ColumnBlockPartition:
    A = code.matrix
    sets = tuple(frozenset(j for j in range(A.cols) if A[l, j]) for l in range(A.rows))
    groups = [[] for _ in range(code.r + 1)]
    for l, s in enumerate(sets):
        groups[len(s)].append(l)
    return ColumnBlockPartition(tuple(tuple(g) for g in groups), sets)


def cayley_table(p: int) -> IntMatrix:
    """Multiplication table of the nonzero residues mod an odd prime."""
    require_odd_prime(p)
    return IntMatrix.from_rows([[i * j % p for j in range(1, p)] for i in range(1, p)])


def outer_rem(u: Sequence[int], p: int) -> IntMatrix:
    return mat_rem(outer(u, u), p)


def b_matrix(p: int) -> IntMatrix:
    """First (p-1)/2 columns of the Cayley table plus a constant-p column."""
    require_odd_prime(p)
    half = (p - 1) // 2
    return IntMatrix.from_rows([[i * j % p for j in range(1, half + 1)] + [p] for i in range(1, p)])


def is_latin(L: IntMatrix, symbols=None) -> bool:
    """True when ``L`` is square and every row and column is a permutation of ``symbols``.

    ``symbols`` defaults to the set of entries of the first row.
    """
    if not L.is_square:
        return False
    target = set(L.row(0)) if symbols is None else set(symbols)
    if len(target) != L.rows:
        return False
    return all(set(L.row(i)) == target for i in range(L.rows)) and all(
        set(L.col(j)) == target for j in range(L.cols)
    )


def random_latin_square(p: int, rng: RngStream) -> IntMatrix:
    """An isotope of the Cayley table: random row, column and symbol permutations."""
    R = cayley_table(p)
    m = p - 1
    rows = rng.permutation(m)
    cols = rng.permutation(m)
    relabel = rng.permutation(m)
    return IntMatrix.from_rows([[relabel[R[i, j] - 1] + 1 for j in cols] for i in rows])


def random_mod_p_invertible(
    n: int,
    p: int,
    entry_range: tuple[int, int],
    rng: RngStream,
    max_attempts: int = DEFAULT_MAX_ATTEMPTS,
) -> IntMatrix:
    """Uniform n x n matrix over ``entry_range`` conditioned on ``det != 0 mod p``.

    Rejection sampling; raises ``SamplingError`` after ``max_attempts`` singular
    draws.
    """
    require_prime(p)
    lo, hi = entry_range
    if not 0 <= lo <= hi <= p - 1:
        raise ValueError(f"entry range [{lo}, {hi}] must lie inside [0, {p - 1}]")
    for _ in range(max_attempts):
        M = IntMatrix.from_rows([[rng.randint(lo, hi) for _ in range(n)] for _ in range(n)])
        if rank_mod_p(M, p).value == n:
            return M
    raise SamplingError(
        f"no matrix invertible mod {p} found in {max_attempts} draws (n={n}, range=[{lo}, {hi}])"
    )


def usv(U: IntMatrix, r: int, V: IntMatrix) -> IntMatrix:
    """``U @ diag(1 x r, 0 x (n-r)) @ V``, formed as first r columns times first r rows."""
    if not (U.is_square and V.is_square and U.rows == V.rows):
        raise ShapeError(f"usv needs two n x n matrices, got {U.shape} and {V.shape}")
    n = U.rows
    if not 0 <= r <= n:
        raise ShapeError(f"rank {r} out of range for n={n}")
    if r == 0:
        return IntMatrix.zeros(n)
    return matmul(U.submatrix(cols=range(r)), V.submatrix(rows=range(r)))


def _check_chain(factors: Sequence[int], n: int) -> list[int]:
    if len(factors) > n:
        raise ValueError(f"{len(factors)} factors do not fit an {n} x {n} matrix")
    padded = list(factors) + [0] * (n - len(factors))
    if any(s < 0 for s in padded):
        raise ValueError("invariant factors must be non-negative")
    for a, b in zip(padded, padded[1:]):
        if (a == 0 and b != 0) or (a != 0 and b % a):
            raise ValueError(f"factors {padded} do not form a divisibility chain")
    return padded


def random_unimodular_ops(n: int, rng: RngStream, count: int | None = None, bound: int = 2):
    """Random ``(dst, src, c)`` row-addition operations, ``c`` in ``[-bound, bound] \\ {0}``."""
    count = 3 * n if count is None else count
    if n < 2:
        return []
    mults = [c for c in range(-bound, bound + 1) if c]
    ops = []
    for _ in range(count):
        dst = rng.randbelow(n)
        src = rng.randbelow(n - 1)
        if src >= dst:
            src += 1
        ops.append((dst, src, rng.choice(mults)))
    return ops


def planted_smith_matrix(
    n: int,
    factors: Sequence[int],
    rng: RngStream,
    ops: int | None = None,
    bound: int = 2,
) -> IntMatrix:
    """``E1 @ diag(factors) @ E2`` with random unimodular ``E1``, ``E2``.

    ``factors`` must be a divisibility chain; it is zero-padded to length ``n``.
    Each of ``E1``, ``E2`` is a product of ``ops`` (default ``3n``) elementary
    row/column additions with multipliers in ``[-bound, bound]``.
    """
    diag = _check_chain(factors, n)
    W = IntMatrix.diag(diag).to_lists()
    for dst, src, c in random_unimodular_ops(n, rng, ops, bound):
        W[dst] = [x + c * y for x, y in zip(W[dst], W[src])]
    for dst, src, c in random_unimodular_ops(n, rng, ops, bound):
        for row in W:
            row[dst] += c * row[src]
    return IntMatrix.from_rows(W)


def embedding_unimodular(code: BinaryCodeMatrix) -> IntMatrix:
    """A 2^r x 2^r 0/1 matrix, invertible mod 2, whose first r columns are the code.

    The remaining columns are unit vectors on every row outside the weight-1
    block, so the determinant is +-1.
    """
    A = code.matrix
    n = A.rows
    extra = [i for i in range(n) if i not in code.row_blocks[1]]
    cols = [list(A.col(j)) for j in range(A.cols)]
    cols += [[1 if k == i else 0 for k in range(n)] for i in extra]
    U = transpose(IntMatrix.from_rows(cols))
    assert abs(det(U)) == 1
    return U

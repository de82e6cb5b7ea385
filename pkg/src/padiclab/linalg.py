"""Exact rank over Z and Z/pZ, Smith normal form, and slow cross-check oracles."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import ShapeError
from .matrix import IntMatrix
from .primes import require_prime

FRACTION_FREE = "fraction-free"
MOD_P = "mod-p"
ORACLE = "oracle"


@dataclass(frozen=True)
class RankResult:
    value: int
    method: str

    def __int__(self):
        return self.value

    def __eq__(self, other):
        if isinstance(other, RankResult):
            return self.value == other.value
        if isinstance(other, int):
            return self.value == other
        return NotImplemented

    def __hash__(self):
        return hash(self.value)


@dataclass(frozen=True)
class SmithDecomposition:
    """``U @ S @ V == A`` with ``U``, ``V`` unimodular and ``S`` in Smith form."""

    U: IntMatrix
    S: IntMatrix
    V: IntMatrix

    @property
    def invariant_factors(self) -> tuple[int, ...]:
        return tuple(self.S[i, i] for i in range(self.S.rows))

    @property
    def rank(self) -> int:
        return sum(1 for s in self.invariant_factors if s != 0)


def _pick_pivot(rows):
    """Smallest nonzero magnitude; ties go to the lowest row, then column."""
    best = None
    best_i = -1
    for i, row in enumerate(rows):
        m = min(map(abs, filter(None, row)), default=0)
        if m and (best is None or m < best):
            best, best_i = m, i
            if m == 1:
                break
    if best is None:
        return None
    row = rows[best_i]
    for j, x in enumerate(row):
        if abs(x) == best:
            return best_i, j


def rank_z(A: IntMatrix) -> RankResult:
    """Rank over Q by Bareiss fraction-free elimination with full pivoting.

    Every intermediate entry is a minor of (a permutation of) ``A``, so the
    division by the previous pivot is always exact.
    """
    rows = [list(r) for r in A.data if any(r)]
    prev = 1
    rank = 0
    while rows:
        pos = _pick_pivot(rows)
        if pos is None:
            break
        pi, pj = pos
        prow = rows[pi]
        piv = prow[pj]
        prest = prow[:pj] + prow[pj + 1:]
        nxt = []
        for i, row in enumerate(rows):
            if i == pi:
                continue
            f = row[pj]
            rest = row[:pj] + row[pj + 1:]
            if f:
                new = [(piv * x - f * y) // prev for x, y in zip(rest, prest)]
            elif piv == prev:
                new = rest
            else:
                new = [piv * x // prev for x in rest]
            if any(new):
                nxt.append(new)
        rows = nxt
        prev = piv
        rank += 1
    return RankResult(rank, FRACTION_FREE)


def rank_mod_p(A: IntMatrix, p: int) -> RankResult:
    """Rank of ``A mod p`` over the field with ``p`` elements."""
    require_prime(p)
    if p == 2:
        return RankResult(_rank_gf2(A), MOD_P)
    rows = [[x % p for x in r] for r in A.data]
    rows = [r for r in rows if any(r)]
    rank = 0
    while rows:
        prow = rows.pop()
        pj = next(j for j, x in enumerate(prow) if x)
        inv = pow(prow[pj], -1, p)
        prow = [x * inv % p for x in prow]
        nxt = []
        for row in rows:
            f = row[pj]
            if f:
                row = [(x - f * y) % p for x, y in zip(row, prow)]
                if not any(row):
                    continue
            nxt.append(row)
        rows = nxt
        rank += 1
    return RankResult(rank, MOD_P)


def _rank_gf2(A: IntMatrix) -> int:
    # Rows packed into ints; XOR basis keyed by leading bit.
    basis = {}
    for r in A.data:
        v = 0
        for x in r:
            v = (v << 1) | (x & 1)
        while v:
            lead = v.bit_length()
            if lead in basis:
                v ^= basis[lead]
            else:
                basis[lead] = v
                break
    return len(basis)


def det(A: IntMatrix) -> int:
    """Determinant by Bareiss elimination with row swaps."""
    if not A.is_square:
        raise ShapeError(f"determinant needs a square matrix, got {A.rows}x{A.cols}")
    m = A.to_lists()
    n = A.rows
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k]), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        piv = m[k][k]
        pk = m[k]
        for i in range(k + 1, n):
            f = m[i][k]
            row = m[i]
            m[i] = row[: k + 1] + [(piv * row[j] - f * pk[j]) // prev for j in range(k + 1, n)]
        prev = piv
    return sign * m[n - 1][n - 1]


def smith_normal_form(A: IntMatrix) -> SmithDecomposition:
    """Smith normal form with transforms, ``A == U @ S @ V``.

    Works by repeated gcd reduction: move the smallest nonzero entry of the
    trailing block to the pivot, clear its row and column by floor-division
    steps, and fold in any row holding an entry the pivot does not divide.
    Each elementary operation applied to the working matrix has its inverse
    accumulated into ``U`` (row ops) or ``V`` (column ops).

    Raises
    ------
    ShapeError
        If ``A`` is not square.
    """
    if not A.is_square:
        raise ShapeError(f"Smith normal form needs a square matrix, got {A.rows}x{A.cols}")
    n = A.rows
    W = A.to_lists()
    U = IntMatrix.identity(n).to_lists()
    V = IntMatrix.identity(n).to_lists()

    def swap_rows(i, j):
        W[i], W[j] = W[j], W[i]
        for row in U:
            row[i], row[j] = row[j], row[i]

    def swap_cols(i, j):
        for row in W:
            row[i], row[j] = row[j], row[i]
        V[i], V[j] = V[j], V[i]

    def add_row(dst, src, c):
        # W[dst] += c*W[src]  <=>  U[:, src] -= c*U[:, dst]
        W[dst] = [x + c * y for x, y in zip(W[dst], W[src])]
        for row in U:
            row[src] -= c * row[dst]

    def add_col(dst, src, c):
        # W[:, dst] += c*W[:, src]  <=>  V[src] -= c*V[dst]
        for row in W:
            row[dst] += c * row[src]
        V[src] = [x - c * y for x, y in zip(V[src], V[dst])]

    for t in range(n):
        while True:
            block = [row[t:] for row in W[t:]]
            pos = _pick_pivot(block)
            if pos is None:
                break
            i, j = pos[0] + t, pos[1] + t
            if i != t:
                swap_rows(t, i)
            if j != t:
                swap_cols(t, j)
            piv = W[t][t]
            dirty = False
            for i in range(t + 1, n):
                if W[i][t]:
                    add_row(i, t, -(W[i][t] // piv))
                    dirty = dirty or W[i][t] != 0
            for j in range(t + 1, n):
                if W[t][j]:
                    add_col(j, t, -(W[t][j] // piv))
                    dirty = dirty or W[t][j] != 0
            if dirty:
                continue
            bad = next(
                (i for i in range(t + 1, n) if any(x % piv for x in W[i][t + 1:])),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if W[t][t] < 0:
            W[t] = [-x for x in W[t]]
            for row in U:
                row[t] = -row[t]

    return SmithDecomposition(
        IntMatrix.from_rows(U), IntMatrix.from_rows(W), IntMatrix.from_rows(V)
    )


def rank_p_via_snf(A: IntMatrix, p: int) -> RankResult:
    """Number of invariant factors that are nonzero and not divisible by ``p``."""
    require_prime(p)
    factors = smith_normal_form(A).invariant_factors
    return RankResult(sum(1 for s in factors if s and s % p), MOD_P)


def _fraction_det(rows) -> Fraction:
    m = [[Fraction(x) for x in r] for r in rows]
    n = len(m)
    result = Fraction(1)
    for k in range(n):
        piv = next((i for i in range(k, n) if m[i][k] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != k:
            m[k], m[piv] = m[piv], m[k]
            result = -result
        result *= m[k][k]
        for i in range(k + 1, n):
            f = m[i][k] / m[k][k]
            if f:
                for j in range(k, n):
                    m[i][j] -= f * m[k][j]
    return result


def snf_minor_gcd_oracle(A: IntMatrix, k: int) -> int:
    """gcd of all k x k minors of ``A`` (the k-th determinantal divisor).

    Exponential in the dimension; meant for matrices up to about 8 x 8.
    """
    if not 1 <= k <= min(A.shape):
        raise IndexError(f"minor size {k} out of range for {A.rows}x{A.cols} matrix")
    g = 0
    for rs in itertools.combinations(range(A.rows), k):
        for cs in itertools.combinations(range(A.cols), k):
            d = _fraction_det([[A[i, j] for j in cs] for i in rs])
            g = math.gcd(g, abs(int(d)))
            if g == 1:
                return 1
    return g


def rank_z_oracle(A: IntMatrix) -> RankResult:
    """Rank by plain Gaussian elimination over the rationals."""
    m = [[Fraction(x) for x in r] for r in A.data]
    rank = 0
    for c in range(A.cols):
        piv = next((i for i in range(rank, A.rows) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for i in range(rank + 1, A.rows):
            f = m[i][c] / m[rank][c]
            if f:
                m[i] = [a - f * b for a, b in zip(m[i], m[rank])]
        rank += 1
        if rank == A.rows:
            break
    return RankResult(rank, ORACLE)

"""Bound evaluators and executable checks for the rank results.

Every check returns a :class:`VerificationReport` that keeps applicability
(were the hypotheses met?) apart from truth (did the claimed relation hold?).
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .constructions import (
    b_matrix,
    binary_code_matrix,
    embedding_unimodular,
    gram,
    is_latin,
    outer_rem,
    planted_smith_matrix,
    random_mod_p_invertible,
    summing_partition,
    usv,
)
from .errors import SizeError
from .linalg import rank_mod_p, rank_z
from .matrix import IntMatrix, mat_quo, mat_rem, padic_expand, transpose
from .primes import require_odd_prime, require_prime
from .rng import RngStream

MAX_VALUATION_ARG = 10**6


@dataclass
class VerificationReport:
    claim: str
    inputs: dict
    computed: dict
    applicable: bool
    holds: bool | None
    notes: str = ""

    def __post_init__(self):
        if not self.applicable:
            self.holds = None

    @property
    def failed(self) -> bool:
        return self.applicable and self.holds is False

    def to_dict(self) -> dict:
        return {
            "claim": self.claim,
            "inputs": _jsonable(self.inputs),
            "computed": _jsonable(self.computed),
            "applicable": self.applicable,
            "holds": self.holds,
            "notes": self.notes,
        }


@dataclass(frozen=True)
class DigitRankProfile:
    p: int
    ranks: tuple[int, ...]

    def __len__(self):
        return len(self.ranks)

    def rank(self, i: int) -> int:
        """Rank of digit ``i``; digits past the expansion are zero."""
        return self.ranks[i] if i < len(self.ranks) else 0


@dataclass
class TrialRecord:
    """One sampled trial of a sweep. Absent quantities stay ``None``."""

    trial: int
    seed: int
    p: int
    n: int
    r: int | None = None
    r0: int | None = None
    rank_rem: int | None = None
    bound_rem: Fraction | None = None
    rank_quo: int | None = None
    bound_quo: Fraction | None = None
    rank_digit1: int | None = None
    bound_conj: int | None = None
    applicable: bool | None = None
    holds: bool | None = None
    tight: bool | None = None
    wall_time_ms: float | None = None
    witness: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def violation(self) -> bool:
        return self.applicable is True and self.holds is False


def _jsonable(value):
    if isinstance(value, Fraction):
        return [value.numerator, value.denominator]
    if isinstance(value, IntMatrix):
        return value.to_lists()
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def within(rank: int, bound: Fraction) -> bool:
    """``rank <= bound`` for a rational bound, compared without rounding."""
    bound = Fraction(bound)
    return rank * bound.denominator <= bound.numerator


# -- Theorem on rem/quo ranks ---------------------------------------------------


def rem_rank_bound(p: int, r0: int) -> Fraction:
    """Upper bound ``(p^r0 - 1)(p + 1) / (2(p - 1))`` on ``rank(A rem p)``."""
    if r0 < 0:
        raise ValueError("r0 must be non-negative")
    return Fraction((p**r0 - 1) * (p + 1), 2 * (p - 1))


def verify_theorem1(A: IntMatrix, p: int) -> VerificationReport:
    """Check both rem and quo rank bounds on a square matrix.

    Applicable only when ``n > p**r0`` with ``r0 = rank_mod_p(A, p)``.
    """
    require_prime(p)
    n = A.rows
    r = rank_z(A).value
    r0 = rank_mod_p(A, p).value
    rank_rem = rank_z(mat_rem(A, p)).value
    rank_quo = rank_z(mat_quo(A, p)).value
    bound = rem_rank_bound(p, r0)
    applicable = A.is_square and n > p**r0
    holds = within(rank_rem, bound) and within(rank_quo, r + bound)
    return VerificationReport(
        claim="theorem1",
        inputs={"p": p, "n": n},
        computed={
            "r": r,
            "r0": r0,
            "rank_rem": rank_rem,
            "bound_rem": bound,
            "rank_quo": rank_quo,
            "bound_quo": r + bound,
        },
        applicable=applicable,
        holds=holds,
        notes="" if applicable else f"n={n} <= p^r0={p**r0}",
    )


def planted_factors(p: int, r0: int, extra: int, rng: RngStream) -> list[int]:
    """A divisibility chain with ``r0`` factors prime to ``p`` then ``extra`` multiples of ``p``."""
    coprime = [m for m in (1, 2, 3, 4, 5) if m % p]
    factors = []
    s = 1
    for _ in range(r0):
        s *= rng.choice(coprime) if rng.randbelow(4) == 0 else 1
        factors.append(s)
    for i in range(extra):
        s *= p if i == 0 else rng.randint(1, 3)
        factors.append(s)
    return factors


def theorem1_trial(
    trial: int,
    seed: int,
    primes: Sequence[int] = (2, 3, 5, 7),
    n_range: tuple[int, int] = (129, 150),
    power_cap: int = 128,
    max_extra: int = 4,
) -> TrialRecord:
    """One planted-Smith instance for the rem/quo theorem.

    ``p`` cycles through ``primes``; ``r0`` is drawn so ``p**r0 <= power_cap``
    and up to ``max_extra`` further invariant factors are divisible by ``p``.
    """
    start = time.perf_counter()
    sub = derive_trial_seed(seed, trial)
    rng = RngStream(sub)
    p = primes[trial % len(primes)]
    n = rng.randint(*n_range)
    max_r0 = 0
    while p ** (max_r0 + 1) <= power_cap:
        max_r0 += 1
    r0 = rng.randint(0, max_r0)
    extra = rng.randint(0, max_extra)
    A = planted_smith_matrix(n, planted_factors(p, r0, extra, rng), rng)
    rep = verify_theorem1(A, p)
    c = rep.computed
    return TrialRecord(
        trial=trial,
        seed=sub,
        p=p,
        n=n,
        r=c["r"],
        r0=c["r0"],
        rank_rem=c["rank_rem"],
        bound_rem=c["bound_rem"],
        rank_quo=c["rank_quo"],
        bound_quo=c["bound_quo"],
        applicable=rep.applicable,
        holds=rep.holds,
        wall_time_ms=(time.perf_counter() - start) * 1000,
    )


def derive_trial_seed(seed: int, trial: int) -> int:
    return RngStream(seed).spawn(trial).seed


# -- Rank-one remainders and Latin squares --------------------------------------


def verify_rank1_rem(u: Sequence[int], p: int) -> VerificationReport:
    """Rank of the multiples ``(c*u) rem p`` for ``c = 1..p-1``.

    Applicable when ``u rem p`` takes every nonzero residue.
    """
    require_odd_prime(p)
    u = list(u)
    target = (p + 1) // 2
    residues = {x % p for x in u}
    applicable = set(range(1, p)) <= residues
    multiples = IntMatrix.from_rows([[(c * x) % p for x in u] for c in range(1, p)])
    rank_multiples = rank_z(multiples).value
    rank_outer = rank_z(outer_rem(u, p)).value
    return VerificationReport(
        claim="rank1rem",
        inputs={"p": p, "n": len(u), "u": u},
        computed={"rank_multiples": rank_multiples, "rank_outer": rank_outer, "expected": target},
        applicable=applicable,
        holds=rank_multiples == target and rank_outer == target,
        notes="" if applicable else "u rem p misses some nonzero residue",
    )


def verify_B_columns(p: int) -> VerificationReport:
    """Column-rank chain of the B matrix: each prefix of k columns has rank k."""
    require_odd_prime(p)
    if p > 101:
        raise SizeError(f"B-matrix check is limited to p <= 101, got {p}")
    B = b_matrix(p)
    half = (p - 1) // 2
    prefix = {k: rank_z(B.submatrix(cols=range(k))).value for k in range(1, half + 1)}
    full = rank_z(B).value
    ok = all(v == k for k, v in prefix.items()) and full == (p + 1) // 2
    return VerificationReport(
        claim="bcols",
        inputs={"p": p},
        computed={"prefix_ranks": prefix, "rank_B": full, "expected": (p + 1) // 2},
        applicable=True,
        holds=ok,
    )


def latin_square_rank_check(L: IntMatrix, p: int) -> VerificationReport:
    require_odd_prime(p)
    target = (p + 1) // 2
    applicable = L.shape == (p - 1, p - 1) and is_latin(L, range(1, p))
    rank = rank_z(L).value
    return VerificationReport(
        claim="latin",
        inputs={"p": p, "order": L.rows},
        computed={"rank": rank, "expected": target},
        applicable=applicable,
        holds=rank == target,
        notes="" if applicable else "not a Latin square of order p-1 on {1..p-1}",
    )


# -- Kummer ---------------------------------------------------------------------


def carry_count(a: int, b: int, p: int) -> int:
    """Carries produced when adding ``a`` and ``b`` in base ``p``."""
    require_prime(p)
    if a < 0 or b < 0:
        raise ValueError("carry_count needs non-negative operands")
    carries = carry = 0
    while a or b or carry:
        carry = 1 if a % p + b % p + carry >= p else 0
        carries += carry
        a //= p
        b //= p
    return carries


def _factorial_valuation(n: int, p: int) -> int:
    total = 0
    q = p
    while q <= n:
        total += n // q
        q *= p
    return total


def binom_valuation(a: int, b: int, p: int) -> int:
    """Exponent of ``p`` in ``C(a+b, a)``, from Legendre's factorial formula."""
    require_prime(p)
    if a < 0 or b < 0:
        raise ValueError("binom_valuation needs non-negative arguments")
    if a + b > MAX_VALUATION_ARG:
        raise SizeError(f"a+b={a + b} exceeds {MAX_VALUATION_ARG}")
    return _factorial_valuation(a + b, p) - _factorial_valuation(a, p) - _factorial_valuation(b, p)


def quo_binom_parity(i: int, k: int) -> VerificationReport:
    """Compare the parity of ``(2^i + k) quo 2^i`` with that of ``C(2^i + k, 2^i)``.

    The binomial's parity is read off its 2-adic valuation (Legendre), so the
    huge coefficient is never formed.
    """
    if i < 1 or k < 0:
        raise ValueError("need i >= 1 and k >= 0")
    quo = (2**i + k) // 2**i
    binom_parity = 1 if binom_valuation(2**i, k, 2) == 0 else 0
    return VerificationReport(
        claim="parity",
        inputs={"i": i, "k": k},
        computed={"quo_parity": quo % 2, "binom_parity": binom_parity},
        applicable=True,
        holds=quo % 2 == binom_parity,
    )


def verify_kummer(max_value: int, primes: Sequence[int]) -> list[VerificationReport]:
    """Exhaustive carry/valuation agreement, one report per prime."""
    reports = []
    for p in primes:
        mismatches = [
            (a, b)
            for a in range(max_value + 1)
            for b in range(max_value + 1)
            if carry_count(a, b, p) != binom_valuation(a, b, p)
        ]
        reports.append(
            VerificationReport(
                claim="kummer",
                inputs={"p": p, "max": max_value},
                computed={"pairs": (max_value + 1) ** 2, "mismatches": mismatches[:10]},
                applicable=True,
                holds=not mismatches,
            )
        )
    return reports


def verify_parity_range(max_i: int, max_k: int) -> list[VerificationReport]:
    """Quotient/binomial parity for all ``1 <= i <= max_i``, ``0 <= k <= max_k``; one report per i."""
    reports = []
    for i in range(1, max_i + 1):
        bad = [k for k in range(max_k + 1) if not quo_binom_parity(i, k).holds]
        reports.append(
            VerificationReport(
                claim="parity",
                inputs={"i": i, "max_k": max_k},
                computed={"checked": max_k + 1, "failures": bad[:10]},
                applicable=True,
                holds=not bad,
            )
        )
    return reports


# -- p-adic digit ranks ---------------------------------------------------------


def digit_rank_profile(M: IntMatrix, p: int) -> DigitRankProfile:
    require_prime(p)
    e = padic_expand(M, p)
    return DigitRankProfile(p, tuple(rank_mod_p(d, p).value for d in e.digits))


def _powers_up_to(r: int):
    i = 1
    while 2**i <= r:
        yield i
        i += 1


def verify_block_lemmas(r: int) -> VerificationReport:
    """Digit-i blocks of the binary-code Gram matrix.

    For every ``i >= 1`` with ``2**i <= r``: column blocks with summing sets
    smaller than ``2**i`` have a zero digit ``i``, and the block with summing
    sets of size exactly ``2**i`` has digit-``i`` rank ``C(r, 2**i)``.
    """
    if not 1 <= r <= 8:
        raise SizeError(f"block lemma check needs 1 <= r <= 8, got {r}")
    code = binary_code_matrix(r)
    M = gram(code.matrix)
    part = summing_partition(code)
    e = padic_expand(M, 2)
    vanishing = {}
    block_rank = {}
    ok = True
    for i in _powers_up_to(r):
        D = e.digit(i)
        zero = all(D.submatrix(cols=part.groups[k]).is_zero() for k in range(2**i))
        rank = rank_mod_p(D.submatrix(cols=part.groups[2**i]), 2).value
        vanishing[i] = zero
        block_rank[i] = rank
        ok = ok and zero and rank == math.comb(r, 2**i)
    return VerificationReport(
        claim="blocks",
        inputs={"r": r},
        computed={
            "small_blocks_zero": vanishing,
            "block_rank": block_rank,
            "expected": {i: math.comb(r, 2**i) for i in _powers_up_to(r)},
        },
        applicable=True,
        holds=ok,
    )


def verify_column_dependence(r: int) -> VerificationReport:
    """Each digit-i column with a larger summing set is the mod-2 sum of the
    digit-i columns indexed by its ``2**i``-subsets.

    Also cross-checks that the whole digit matrix has the same mod-2 rank as
    the ``2**i`` block.
    """
    if not 1 <= r <= 7:
        raise SizeError(f"column dependence check needs 1 <= r <= 7, got {r}")
    code = binary_code_matrix(r)
    M = gram(code.matrix)
    part = summing_partition(code)
    e = padic_expand(M, 2)
    checked = 0
    failures = []
    rank_match = {}
    for i in _powers_up_to(r):
        D = e.digit(i)
        cols = [D.col(l) for l in range(D.cols)]
        for size in range(2**i + 1, r + 1):
            for l in part.groups[size]:
                acc = [0] * D.rows
                for subset in itertools.combinations(sorted(part.summing_sets[l]), 2**i):
                    c = cols[part.column_for(subset)]
                    acc = [a ^ (x & 1) for a, x in zip(acc, c)]
                checked += 1
                if acc != [x & 1 for x in cols[l]]:
                    failures.append({"i": i, "column": l})
        full = rank_mod_p(D, 2).value
        block = rank_mod_p(D.submatrix(cols=part.groups[2**i]), 2).value
        rank_match[i] = (full, block)
    ok = not failures and all(f == b for f, b in rank_match.values())
    return VerificationReport(
        claim="dependence",
        inputs={"r": r},
        computed={"columns_checked": checked, "failures": failures[:10], "full_vs_block_rank": rank_match},
        applicable=True,
        holds=ok,
        notes="no larger summing sets; vacuous" if checked == 0 else "",
    )


def _covers_all_patterns(vectors, r: int) -> bool:
    return len({tuple(v) for v in vectors}) == 2**r and all(x in (0, 1) for v in vectors for x in v)


def check_padic_instance(U: IntMatrix, r: int, V: IntMatrix, **inputs) -> VerificationReport:
    """Compare the 2-adic digit ranks of ``M = usv(U, r, V)`` with ``C(r, 2**i)``.

    Equality is asserted only when the first ``r`` columns of ``U`` and the
    first ``r`` rows of ``V`` each contain all ``2**r`` binary patterns; the
    bare hypotheses (0/1 entries, odd determinants, ``n >= 2**r``) are not
    enough, e.g. ``U = V = I``. Without coverage the outcome is recorded as an
    observation.
    """
    M = usv(U, r, V)
    profile = digit_rank_profile(M, 2)
    L_rows = [U.row(k)[:r] for k in range(U.rows)]
    R_cols = [V.col(k)[:r] for k in range(V.cols)]
    coverage = r >= 1 and _covers_all_patterns(L_rows, r) and _covers_all_patterns(R_cols, r)
    top = max(len(profile) - 1, max(_powers_up_to(r), default=0))
    expected = {i: math.comb(r, 2**i) for i in range(1, top + 1)}
    observed = {i: profile.rank(i) for i in range(1, top + 1)}
    match = expected == observed
    report = VerificationReport(
        claim="padic",
        inputs={"n": U.rows, "r": r, **inputs},
        computed={
            "profile": list(profile.ranks),
            "expected": expected,
            "observed": observed,
            "coverage": coverage,
            "match": match,
        },
        applicable=coverage,
        holds=match,
        notes="" if coverage else "observational: binary patterns not covered",
    )
    return report


def canonical_padic_report(r: int) -> VerificationReport:
    """Digit-rank check with ``U``, ``V`` embedding the binary code matrix (``n = 2**r``)."""
    code = binary_code_matrix(r)
    U = embedding_unimodular(code)
    return check_padic_instance(U, r, transpose(U), canonical=True)


def verify_theorem_padic(n: int, r: int, trials: int, rng: RngStream) -> list[VerificationReport]:
    """Random 0/1 ``U``, ``V`` invertible mod 2; one report per trial."""
    if not 1 <= r <= 6:
        raise SizeError(f"p-adic theorem check needs 1 <= r <= 6, got {r}")
    if n < 2**r:
        raise ValueError(f"need n >= 2^r = {2**r}, got n={n}")
    reports = []
    for t in range(trials):
        sub = rng.spawn(t)
        U = random_mod_p_invertible(n, 2, (0, 1), sub)
        V = random_mod_p_invertible(n, 2, (0, 1), sub)
        reports.append(check_padic_instance(U, r, V, trial=t, seed=sub.seed))
    return reports


# -- Odd-prime conjecture -------------------------------------------------------


def conjecture_bound(p: int, r: int) -> int:
    """Conjectured ceiling on the mod-p rank of digit 1 for ``p = 2k+1``."""
    require_odd_prime(p)
    if r < 0:
        raise ValueError("r must be non-negative")
    k = (p - 1) // 2
    return sum(math.comb(r + 2 * i, 2 * i + 1) for i in range(k + 1)) + math.comb(r + 2 * k - 1, 2 * k) - 2 * r


def conjecture_trial(p: int, r: int, n: int, rng: RngStream, trial: int = 0) -> TrialRecord:
    """Sample ``U``, ``V`` uniform over ``[0, p-1]`` and invertible mod p; rank digit 1 of ``usv``."""
    require_odd_prime(p)
    if not 0 <= r <= n:
        raise ValueError(f"need 0 <= r <= n, got r={r}, n={n}")
    start = time.perf_counter()
    U = random_mod_p_invertible(n, p, (0, p - 1), rng)
    V = random_mod_p_invertible(n, p, (0, p - 1), rng)
    M = usv(U, r, V)
    rank = rank_mod_p(padic_expand(M, p).digit(1), p).value
    bound = conjecture_bound(p, r)
    return TrialRecord(
        trial=trial,
        seed=rng.seed,
        p=p,
        n=n,
        r=r,
        rank_digit1=rank,
        bound_conj=bound,
        applicable=True,
        holds=rank <= bound,
        tight=rank == bound,
        wall_time_ms=(time.perf_counter() - start) * 1000,
        witness={"U": U, "V": V},
    )


def conjecture_rank1_exhaustive(p: int, n: int) -> dict:
    """Every nonzero ``u, v`` in ``[0, p-1]^n``: digit-1 rank of ``u v^T`` versus the r=1 bound.

    A nonzero residue vector is exactly what can occur as a column of an
    invertible ``U`` (or a row of ``V``), so this covers all valid rank-one
    inputs at size ``n``.
    """
    require_odd_prime(p)
    bound = conjecture_bound(p, 1)
    vectors = [v for v in itertools.product(range(p), repeat=n) if any(v)]
    worst = 0
    exceptions = []
    for u in vectors:
        for v in vectors:
            D = IntMatrix.from_rows([[(a * b // p) % p for b in v] for a in u])
            rank = rank_mod_p(D, p).value
            worst = max(worst, rank)
            if rank > bound:
                exceptions.append((u, v))
    return {"p": p, "n": n, "pairs": len(vectors) ** 2, "bound": bound, "max_rank": worst, "exceptions": exceptions}

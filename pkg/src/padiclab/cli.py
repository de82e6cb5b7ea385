"""Command-line front end.

Exit codes: 0 when every asserted check holds, 1 when one fails (or the
conjecture sampler finds a violation), 2 on usage, parse or I/O errors.
Machine-readable output goes to stdout (or ``--out``); diagnostics go to
stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from . import constructions as cons
from .errors import PadicLabError
from .linalg import rank_mod_p, rank_z, smith_normal_form
from .matrix import IntMatrix, parse_matrix, serialize_matrix
from .primes import is_prime, require_odd_prime, require_prime
from .rng import RngStream, derive_seed
from .theorems import (
    TrialRecord,
    VerificationReport,
    canonical_padic_report,
    conjecture_trial,
    digit_rank_profile,
    latin_square_rank_check,
    theorem1_trial,
    verify_B_columns,
    verify_block_lemmas,
    verify_column_dependence,
    verify_kummer,
    verify_parity_range,
    verify_rank1_rem,
    verify_theorem1,
    verify_theorem_padic,
)

DEFAULT_SEED = 0xE15E
THREADS_ENV = "PADICLAB_THREADS"

CSV_COLUMNS = (
    "trial", "seed", "p", "n", "r", "r0",
    "rank_rem", "bound_rem_num", "bound_rem_den",
    "rank_quo", "bound_quo_num", "bound_quo_den",
    "rank_digit1", "bound_conj", "applicable", "holds", "tight", "wall_time_ms",
)
REPORT_COLUMNS = ("claim", "applicable", "holds", "inputs", "computed", "notes")


class UsageError(Exception):
    pass


@dataclass
class ExperimentConfig:
    command: str
    p: int
    r: int
    n: int
    trials: int
    seed: int = DEFAULT_SEED
    format: str = "csv"
    out: str | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise UsageError("--trials must be >= 1")


# -- argument helpers -----------------------------------------------------------


def int_auto(text: str) -> int:
    """Integer in any Python literal base (``42``, ``0xE15E``)."""
    try:
        return int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None


def int_list(text: str) -> list[int]:
    """``"2,3,5"``, ``"5..97"`` or a mix such as ``"2,7..11"``."""
    out = []
    try:
        for part in text.split(","):
            if ".." in part:
                lo, hi = (int(x) for x in part.split(".."))
                if lo > hi:
                    raise ValueError
                out.extend(range(lo, hi + 1))
            else:
                out.append(int(part))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer list or range: {text!r}") from None
    if not out:
        raise argparse.ArgumentTypeError("empty list")
    return out


def int_pair_range(text: str) -> tuple[int, int]:
    vals = int_list(text)
    return min(vals), max(vals)


def odd_primes_in(values: list[int]) -> list[int]:
    """Keep the odd primes of a range; a single explicit value must itself qualify."""
    if len(values) == 1:
        require_odd_prime(values[0])
        return values
    primes = [p for p in values if p > 2 and is_prime(p)]
    if not primes:
        raise UsageError("no odd primes in the requested range")
    return primes


def thread_count() -> int:
    raw = os.environ.get(THREADS_ENV, "").strip()
    if not raw:
        return 0
    try:
        return max(0, int(raw))
    except ValueError:
        raise UsageError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None


def run_trials(fn, jobs, workers: int):
    """Map ``fn`` over ``jobs``, in order; processes when ``workers > 1``."""
    if workers <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs, chunksize=max(1, len(jobs) // (4 * workers))))


def read_matrix(path: str) -> IntMatrix:
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    return parse_matrix(text)


# -- output ---------------------------------------------------------------------


def _flag(value):
    if value is None:
        return ""
    return "true" if value else "false"


def _blank(value):
    return "" if value is None else value


def record_row(rec: TrialRecord) -> list:
    def frac(f):
        return ("", "") if f is None else (f.numerator, f.denominator)

    rem_num, rem_den = frac(rec.bound_rem)
    quo_num, quo_den = frac(rec.bound_quo)
    return [
        rec.trial, rec.seed, rec.p, rec.n, _blank(rec.r), _blank(rec.r0),
        _blank(rec.rank_rem), rem_num, rem_den,
        _blank(rec.rank_quo), quo_num, quo_den,
        _blank(rec.rank_digit1), _blank(rec.bound_conj),
        _flag(rec.applicable), _flag(rec.holds), _flag(rec.tight),
        "" if rec.wall_time_ms is None else f"{rec.wall_time_ms:.3f}",
    ]


def record_dict(rec: TrialRecord) -> dict:
    return dict(zip(CSV_COLUMNS, record_row(rec)))


def format_records(records, fmt: str) -> str:
    buf = io.StringIO()
    if fmt == "csv":
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for rec in records:
            w.writerow(record_row(rec))
    else:
        for rec in records:
            buf.write(json.dumps(record_dict(rec)) + "\n")
    return buf.getvalue()


def format_reports(reports, fmt: str) -> str:
    buf = io.StringIO()
    if fmt == "csv":
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(REPORT_COLUMNS)
        for rep in reports:
            d = rep.to_dict()
            w.writerow([
                d["claim"], _flag(d["applicable"]), _flag(d["holds"]),
                json.dumps(d["inputs"]), json.dumps(d["computed"]), d["notes"],
            ])
    else:
        for rep in reports:
            buf.write(json.dumps(rep.to_dict()) + "\n")
    return buf.getvalue()


def emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def note(args, message: str):
    if not args.quiet:
        print(message, file=sys.stderr)


# -- commands -------------------------------------------------------------------


def cmd_rank(args) -> int:
    A = read_matrix(args.file)
    value = rank_z(A).value if args.mod is None else rank_mod_p(A, args.mod).value
    emit(f"rank {value}\n", args.out)
    return 0


def cmd_snf(args) -> int:
    A = read_matrix(args.file)
    d = smith_normal_form(A)
    text = " ".join(map(str, d.invariant_factors)) + "\n"
    if args.transforms:
        text += "U\n" + serialize_matrix(d.U) + "V\n" + serialize_matrix(d.V)
    emit(text, args.out)
    return 0


def cmd_digits(args) -> int:
    M = read_matrix(args.file)
    require_prime(args.p)
    profile = digit_rank_profile(M, args.p)
    text = "ranks " + " ".join(map(str, profile.ranks)) + "\n"
    if args.dump:
        from .matrix import padic_expand

        for i, D in enumerate(padic_expand(M, args.p).digits):
            text += f"digit {i}\n" + serialize_matrix(D)
    emit(text, args.out)
    return 0


def cmd_gen(args) -> int:
    kind = args.kind
    rng = RngStream(args.seed)

    def need(name):
        value = getattr(args, name)
        if value is None:
            raise UsageError(f"gen {kind} needs --{name}")
        return value

    if kind == "identity":
        M = IntMatrix.identity(need("n"))
    elif kind == "cayley":
        M = cons.cayley_table(need("p"))
    elif kind == "bmatrix":
        M = cons.b_matrix(need("p"))
    elif kind == "binary-code":
        M = cons.binary_code_matrix(need("r")).matrix
    elif kind == "gram":
        M = cons.gram(cons.binary_code_matrix(need("r")).matrix)
    elif kind == "latin":
        M = cons.random_latin_square(need("p"), rng)
    elif kind == "planted":
        M = cons.planted_smith_matrix(need("n"), need("factors"), rng)
    elif kind == "invertible":
        p = need("p")
        M = cons.random_mod_p_invertible(need("n"), p, (0, p - 1), rng)
    elif kind == "outer-rem":
        M = cons.outer_rem(need("u"), need("p"))
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(f"unknown generator {kind}")
    fmt = "structured" if args.format == "structured" else "text"
    emit(serialize_matrix(M, fmt), args.out)
    return 0


def _theorem1_job(job):
    trial, seed, primes, n_range = job
    return theorem1_trial(trial, seed, primes=primes, n_range=n_range)


def _verify_theorem1(args):
    if args.file:
        if args.p is None:
            raise UsageError("verify theorem1 --file needs --p")
        A = read_matrix(args.file)
        return [verify_theorem1(A, p) for p in args.p], None
    primes = args.primes or [2, 3, 5, 7]
    for p in primes:
        require_prime(p)
    n_range = args.n_range or (129, 150)
    jobs = [(t, args.seed, tuple(primes), n_range) for t in range(args.trials)]
    return None, run_trials(_theorem1_job, jobs, thread_count())


def cmd_verify(args) -> int:
    claim = args.claim
    records = None
    if claim == "theorem1":
        reports, records = _verify_theorem1(args)
    elif claim == "rank1rem":
        reports = []
        for p in odd_primes_in(args.p or [7]):
            u = args.u if args.u is not None else list(range(1, p))
            reports.append(verify_rank1_rem(u, p))
    elif claim == "bcols":
        reports = [verify_B_columns(p) for p in odd_primes_in(args.p or int_list("3..101"))]
    elif claim == "latin":
        reports = []
        for p in odd_primes_in(args.p or int_list("5..97")):
            if args.random:
                reports.append(_latin_sample_report(p, args.random, args.seed))
            else:
                reports.append(latin_square_rank_check(cons.cayley_table(p), p))
    elif claim == "kummer":
        reports = verify_kummer(args.max, args.primes or [2, 3, 5, 7, 11])
    elif claim == "parity":
        reports = verify_parity_range(args.max_i, args.max_k)
    elif claim == "blocks":
        reports = [verify_block_lemmas(r) for r in args.r or int_list("1..8")]
    elif claim == "dependence":
        reports = [verify_column_dependence(r) for r in args.r or int_list("1..7")]
    elif claim == "padic":
        rs = args.r or [4]
        if args.canonical:
            reports = [canonical_padic_report(r) for r in rs]
        else:
            reports = []
            for r in rs:
                n = args.n if args.n is not None else 2**r
                reports.extend(verify_theorem_padic(n, r, args.trials, RngStream(args.seed)))
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(f"unknown claim {claim}")

    if records is not None:
        emit(format_records(records, args.format), args.out)
        bad = [rec for rec in records if rec.violation]
        note(args, f"trials {len(records)} applicable {sum(bool(r.applicable) for r in records)} violations {len(bad)}")
        return 1 if bad else 0

    emit(format_reports(reports, args.format), args.out)
    failed = [rep for rep in reports if rep.failed]
    if claim == "padic":
        for rep in reports:
            note(args, "profile " + " ".join(map(str, rep.computed["profile"])))
    note(args, f"reports {len(reports)} applicable {sum(r.applicable for r in reports)} failed {len(failed)}")
    return 1 if failed else 0


def _latin_sample_report(p: int, samples: int, seed: int) -> VerificationReport:
    """Observational: how often a random isotope of the Cayley table keeps rank (p+1)/2."""
    master = RngStream(seed)
    hits = 0
    ranks = {}
    for t in range(samples):
        rep = latin_square_rank_check(cons.random_latin_square(p, master.spawn(t)), p)
        rank = rep.computed["rank"]
        ranks[rank] = ranks.get(rank, 0) + 1
        hits += bool(rep.holds)
    return VerificationReport(
        claim="latin-random",
        inputs={"p": p, "samples": samples, "seed": seed},
        computed={"holds_count": hits, "frequency": hits / samples, "rank_histogram": dict(sorted(ranks.items()))},
        applicable=True,
        holds=None,
        notes="observational; not asserted",
    )


def _conjecture_job(job):
    p, r, n, seed, trial = job
    return conjecture_trial(p, r, n, RngStream(derive_seed(seed, trial)), trial=trial)


def cmd_conjecture(args) -> int:
    cfg = ExperimentConfig("conjecture", args.p, args.r, args.n, args.trials, args.seed, args.format, args.out)
    require_odd_prime(cfg.p)
    if not 0 <= cfg.r <= cfg.n:
        raise UsageError("need 0 <= r <= n")
    jobs = [(cfg.p, cfg.r, cfg.n, cfg.seed, t) for t in range(cfg.trials)]
    records = run_trials(_conjecture_job, jobs, thread_count())
    emit(format_records(records, cfg.format), cfg.out)
    violations = [rec for rec in records if rec.violation]
    tight = sum(bool(rec.tight) for rec in records)
    note(
        args,
        f"trials {len(records)} violations {len(violations)} "
        f"tight {tight} tight_frequency {tight / len(records):.4f} bound {records[0].bound_conj}",
    )
    for rec in violations:
        _dump_violation(args, rec)
    return 1 if violations else 0


def _dump_violation(args, rec: TrialRecord):
    U = serialize_matrix(rec.witness["U"])
    V = serialize_matrix(rec.witness["V"])
    print(f"VIOLATION trial {rec.trial} seed {rec.seed} rank {rec.rank_digit1} > bound {rec.bound_conj}", file=sys.stderr)
    if args.out:
        base = Path(args.out)
        base.with_name(f"{base.name}.trial{rec.trial}.U.txt").write_text(U)
        base.with_name(f"{base.name}.trial{rec.trial}.V.txt").write_text(V)
    else:
        sys.stderr.write("U\n" + U + "V\n" + V)


# -- parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int_auto, default=DEFAULT_SEED, help="master seed (default 0xE15E)")
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--format", choices=("csv", "structured"), default="csv")
    common.add_argument("--quiet", action="store_true", help="suppress stderr summaries")

    parser = argparse.ArgumentParser(prog="padiclab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rank", parents=[common], help="integer or mod-p rank of a matrix file")
    p.add_argument("file")
    p.add_argument("--mod", type=int_auto)
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("snf", parents=[common], help="Smith normal form invariant factors")
    p.add_argument("file")
    p.add_argument("--transforms", action="store_true", help="also print U and V")
    p.set_defaults(func=cmd_snf)

    p = sub.add_parser("digits", parents=[common], help="mod-p ranks of the p-adic digit matrices")
    p.add_argument("file")
    p.add_argument("--p", type=int_auto, required=True)
    p.add_argument("--dump", action="store_true", help="print each digit matrix")
    p.set_defaults(func=cmd_digits)

    p = sub.add_parser("verify", parents=[common], help="run a verifier")
    p.add_argument(
        "claim",
        choices=("theorem1", "rank1rem", "bcols", "latin", "kummer", "parity", "blocks", "dependence", "padic"),
    )
    p.add_argument("--p", type=int_list, help="prime, list or range (a..b)")
    p.add_argument("--primes", type=int_list)
    p.add_argument("--r", type=int_list)
    p.add_argument("--n", type=int)
    p.add_argument("--n-range", type=int_pair_range)
    p.add_argument("--u", type=int_list, help="vector for rank1rem, comma separated")
    p.add_argument("--file", help="matrix file for theorem1")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--random", type=int, default=0, help="latin: number of random samples per p")
    p.add_argument("--canonical", action="store_true", help="padic: embed the binary code matrix")
    p.add_argument("--max", type=int, default=300)
    p.add_argument("--max-i", type=int, default=12)
    p.add_argument("--max-k", type=int, default=4096)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("conjecture", parents=[common], help="seeded sampler for the odd-prime digit-1 bound")
    p.add_argument("--p", type=int_auto, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, default=100)
    p.set_defaults(func=cmd_conjecture)

    p = sub.add_parser("gen", parents=[common], help="write a generated matrix")
    p.add_argument(
        "kind",
        choices=("identity", "cayley", "bmatrix", "binary-code", "gram", "latin", "planted", "invertible", "outer-rem"),
    )
    p.add_argument("--n", type=int)
    p.add_argument("--p", type=int_auto)
    p.add_argument("--r", type=int)
    p.add_argument("--factors", type=int_list)
    p.add_argument("--u", type=int_list)
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (PadicLabError, UsageError, OSError, ValueError) as exc:
        print(f"padiclab {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

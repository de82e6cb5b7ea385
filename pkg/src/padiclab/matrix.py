"""Dense exact integer matrices, element-wise Euclidean division, p-adic digits.

Matrices are immutable; every operation returns a new ``IntMatrix``. Entries are
plain Python ints, so nothing ever overflows.
"""

from __future__ import annotations

import json
import operator
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import DomainError, MalformedExpansionError, ParseError, ShapeError
from .primes import require_modulus

# Largest magnitude a JSON consumer can read back exactly as a double.
_JSON_SAFE = 2**53
_TOKEN = re.compile(r"\S+")
_INT = re.compile(r"[+-]?[0-9]+")


@dataclass(frozen=True)
class IntMatrix:
    """A rows x cols matrix of arbitrary-precision integers, stored row-major."""

    rows: int
    cols: int
    data: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ShapeError(f"matrix dimensions must be positive, got {self.rows}x{self.cols}")
        if len(self.data) != self.rows or any(len(row) != self.cols for row in self.data):
            raise ShapeError(f"entry count does not match shape {self.rows}x{self.cols}")

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int]]) -> IntMatrix:
        data = tuple(tuple(int(x) for x in row) for row in rows)
        if not data:
            raise ShapeError("matrix must have at least one row")
        return cls(len(data), len(data[0]), data)

    @classmethod
    def zeros(cls, rows: int, cols: int | None = None) -> IntMatrix:
        cols = rows if cols is None else cols
        return cls(rows, cols, tuple((0,) * cols for _ in range(rows)))

    @classmethod
    def identity(cls, n: int) -> IntMatrix:
        return cls.diag([1] * n)

    @classmethod
    def diag(cls, values: Sequence[int]) -> IntMatrix:
        n = len(values)
        return cls.from_rows([[values[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def column(cls, values: Sequence[int]) -> IntMatrix:
        return cls.from_rows([[v] for v in values])

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.data[i][j]

    def row(self, i: int) -> tuple[int, ...]:
        return self.data[i]

    def col(self, j: int) -> tuple[int, ...]:
        return tuple(row[j] for row in self.data)

    def to_lists(self) -> list[list[int]]:
        return [list(row) for row in self.data]

    def entries(self) -> Iterable[int]:
        for row in self.data:
            yield from row

    def is_zero(self) -> bool:
        return not any(any(row) for row in self.data)

    def submatrix(self, rows: Sequence[int] | None = None, cols: Sequence[int] | None = None) -> IntMatrix:
        rows = range(self.rows) if rows is None else rows
        cols = range(self.cols) if cols is None else cols
        return IntMatrix.from_rows([[self.data[i][j] for j in cols] for i in rows])

    def map(self, fn) -> IntMatrix:
        return IntMatrix(self.rows, self.cols, tuple(tuple(fn(x) for x in row) for row in self.data))

    def scale(self, c: int) -> IntMatrix:
        return self.map(lambda x: c * x)

    def _check_same_shape(self, other: IntMatrix):
        if self.shape != other.shape:
            raise ShapeError(f"shape mismatch: {self.shape} vs {other.shape}")

    def __add__(self, other: IntMatrix) -> IntMatrix:
        self._check_same_shape(other)
        return IntMatrix(
            self.rows,
            self.cols,
            tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.data, other.data)),
        )

    def __sub__(self, other: IntMatrix) -> IntMatrix:
        self._check_same_shape(other)
        return IntMatrix(
            self.rows,
            self.cols,
            tuple(tuple(a - b for a, b in zip(r, s)) for r, s in zip(self.data, other.data)),
        )

    def __neg__(self) -> IntMatrix:
        return self.scale(-1)

    def __matmul__(self, other: IntMatrix) -> IntMatrix:
        return matmul(self, other)

    @property
    def T(self) -> IntMatrix:
        return transpose(self)

    def __str__(self) -> str:
        return serialize_matrix(self).rstrip("\n")


def matmul(A: IntMatrix, B: IntMatrix) -> IntMatrix:
    if A.cols != B.rows:
        raise ShapeError(f"cannot multiply {A.rows}x{A.cols} by {B.rows}x{B.cols}")
    bcols = list(zip(*B.data))
    return IntMatrix(
        A.rows,
        B.cols,
        tuple(tuple(sum(map(operator.mul, row, col)) for col in bcols) for row in A.data),
    )


def transpose(A: IntMatrix) -> IntMatrix:
    return IntMatrix(A.cols, A.rows, tuple(zip(*A.data)))


def outer(u: Sequence[int], v: Sequence[int]) -> IntMatrix:
    """Return u * v^T for two integer vectors given as plain sequences."""
    if len(u) == 0 or len(v) == 0:
        raise ShapeError("outer product of an empty vector")
    return IntMatrix.from_rows([[a * b for b in v] for a in u])


def mat_rem(A: IntMatrix, p: int) -> IntMatrix:
    """Element-wise Euclidean remainder, always in ``[0, p-1]``."""
    require_modulus(p)
    return A.map(lambda x: x % p)


def mat_quo(A: IntMatrix, p: int) -> IntMatrix:
    """Element-wise Euclidean quotient, so that ``A == p*quo + rem``."""
    require_modulus(p)
    return A.map(lambda x: x // p)


@dataclass(frozen=True)
class PAdicExpansion:
    """Digit matrices of a non-negative matrix: ``M = sum(p**i * digits[i])``."""

    p: int
    digits: tuple[IntMatrix, ...]

    def __post_init__(self):
        require_modulus(self.p)
        if not self.digits:
            raise MalformedExpansionError("expansion has no digit matrices")
        shape = self.digits[0].shape
        for i, d in enumerate(self.digits):
            if d.shape != shape:
                raise MalformedExpansionError(f"digit {i} has shape {d.shape}, expected {shape}")
            for x in d.entries():
                if not 0 <= x < self.p:
                    raise MalformedExpansionError(
                        f"digit {i} has entry {x} outside [0, {self.p - 1}]"
                    )

    def __len__(self) -> int:
        return len(self.digits)

    def digit(self, i: int) -> IntMatrix:
        """Digit ``i``, or a zero matrix past the canonical length."""
        if i < len(self.digits):
            return self.digits[i]
        return IntMatrix.zeros(*self.digits[0].shape)


def padic_expand(M: IntMatrix, p: int) -> PAdicExpansion:
    """Split a non-negative matrix into its base-``p`` digit matrices.

    Trailing zero digits are dropped; the zero matrix expands to a single zero
    digit.

    Raises
    ------
    DomainError
        If any entry is negative.
    """
    require_modulus(p)
    for i, row in enumerate(M.data):
        for j, x in enumerate(row):
            if x < 0:
                raise DomainError(f"negative entry {x} at ({i}, {j}); p-adic expansion needs entries >= 0")
    digits = []
    rest = M
    while True:
        digits.append(mat_rem(rest, p))
        rest = mat_quo(rest, p)
        if rest.is_zero():
            break
    return PAdicExpansion(p, tuple(digits))


def padic_reconstruct(e: PAdicExpansion) -> IntMatrix:
    acc = e.digits[-1]
    for d in reversed(e.digits[:-1]):
        acc = acc.scale(e.p) + d
    return acc


def parse_matrix(text: str) -> IntMatrix:
    """Parse the text format: a ``ROWS COLS`` header, then one line per row.

    Input that starts with ``{`` is handed to :func:`parse_structured`.
    """
    if text.lstrip().startswith("{"):
        return parse_structured(text)
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise ParseError("empty input", line=1)
    header = lines[0].split()
    if len(header) != 2:
        raise ParseError(f"header must be 'ROWS COLS', got {lines[0]!r}", line=1)
    rows, cols = (_parse_int(m, 1) for m in _TOKEN.finditer(lines[0]))
    if rows < 1 or cols < 1:
        raise ParseError(f"dimensions must be positive, got {rows}x{cols}", line=1)
    body = lines[1:]
    if len(body) != rows:
        raise ParseError(f"expected {rows} rows, found {len(body)}", line=len(lines) + 1)
    data = []
    for k, line in enumerate(body, start=2):
        tokens = list(_TOKEN.finditer(line))
        if len(tokens) != cols:
            raise ParseError(f"row {k - 1} has {len(tokens)} of {cols} tokens", line=k)
        data.append(tuple(_parse_int(m, k) for m in tokens))
    return IntMatrix(rows, cols, tuple(data))


def _parse_int(match: re.Match, line_no: int) -> int:
    token = match.group()
    if not _INT.fullmatch(token):
        raise ParseError(f"not an integer: {token!r}", line=line_no, column=match.start() + 1)
    return int(token)


def parse_structured(obj) -> IntMatrix:
    """Build a matrix from ``{"rows", "cols", "data"}``, given as a dict or JSON text."""
    if isinstance(obj, (str, bytes)):
        try:
            obj = json.loads(obj)
        except json.JSONDecodeError as exc:
            raise ParseError(exc.msg, line=exc.lineno, column=exc.colno) from None
    if not isinstance(obj, dict) or not {"rows", "cols", "data"} <= obj.keys():
        raise ParseError("structured matrix needs keys 'rows', 'cols', 'data'")
    rows, cols, data = obj["rows"], obj["cols"], obj["data"]
    if not isinstance(data, list) or len(data) != rows:
        raise ParseError(f"expected {rows} rows in 'data'")
    out = []
    for i, row in enumerate(data):
        if not isinstance(row, list) or len(row) != cols:
            raise ParseError(f"row {i + 1} does not have {cols} entries")
        vals = []
        for x in row:
            if isinstance(x, bool) or not isinstance(x, (int, str)):
                raise ParseError(f"row {i + 1}: not an integer: {x!r}")
            try:
                vals.append(int(x))
            except ValueError:
                raise ParseError(f"row {i + 1}: not an integer: {x!r}") from None
        out.append(tuple(vals))
    try:
        return IntMatrix(rows, cols, tuple(out))
    except ShapeError as exc:
        raise ParseError(str(exc)) from None


def to_structured(A: IntMatrix) -> dict:
    def enc(x):
        return str(x) if abs(x) >= _JSON_SAFE else x

    return {"rows": A.rows, "cols": A.cols, "data": [[enc(x) for x in row] for row in A.data]}


def serialize_matrix(A: IntMatrix, format: str = "text") -> str:
    if format == "text":
        lines = [f"{A.rows} {A.cols}"]
        lines.extend(" ".join(map(str, row)) for row in A.data)
        return "\n".join(lines) + "\n"
    if format == "structured":
        return json.dumps(to_structured(A)) + "\n"
    raise ValueError(f"unknown matrix format {format!r}")

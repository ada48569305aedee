"""Small dense complex matrices.

Matrices are immutable row-major values.  The heavy products are delegated to
the active kernel backend (compiled when available, pure Python otherwise);
everything else is plain Python.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from . import _backend


class DimensionError(ValueError):
    """Operand shapes are incompatible."""


@dataclass(frozen=True)
class ComplexMatrix:
    rows: int
    cols: int
    entries: tuple[complex, ...]

    def __post_init__(self):
        if self.rows <= 0 or self.cols <= 0:
            raise DimensionError(f"matrix dimensions must be positive, got {self.rows}x{self.cols}")
        if len(self.entries) != self.rows * self.cols:
            raise DimensionError(
                f"{self.rows}x{self.cols} matrix needs {self.rows * self.cols} entries, "
                f"got {len(self.entries)}"
            )

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[complex]]) -> ComplexMatrix:
        r = len(rows)
        c = len(rows[0]) if r else 0
        if any(len(row) != c for row in rows):
            raise DimensionError("ragged rows")
        return cls(r, c, tuple(complex(x) for row in rows for x in row))

    @classmethod
    def _wrap(cls, rows: int, cols: int, entries: Iterable[complex]) -> ComplexMatrix:
        return cls(rows, cols, tuple(entries))

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, idx: tuple[int, int]) -> complex:
        i, j = idx
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(f"index ({i}, {j}) out of range for {self.rows}x{self.cols}")
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[complex, ...]:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def tolist(self) -> list[list[complex]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def __matmul__(self, other: ComplexMatrix) -> ComplexMatrix:
        return matmul(self, other)

    def __add__(self, other: ComplexMatrix) -> ComplexMatrix:
        return add(self, other)

    def __sub__(self, other: ComplexMatrix) -> ComplexMatrix:
        return sub(self, other)

    def __neg__(self) -> ComplexMatrix:
        return scale(self, -1)

    def __repr__(self) -> str:
        return f"ComplexMatrix({self.rows}x{self.cols}, {self.tolist()!r})"


def identity(n: int) -> ComplexMatrix:
    return ComplexMatrix._wrap(n, n, (1 + 0j if i == j else 0j for i in range(n) for j in range(n)))


def zeros(rows: int, cols: int | None = None) -> ComplexMatrix:
    cols = rows if cols is None else cols
    return ComplexMatrix(rows, cols, (0j,) * (rows * cols))


def diag(values: Sequence[complex]) -> ComplexMatrix:
    n = len(values)
    return ComplexMatrix._wrap(n, n, (complex(values[i]) if i == j else 0j for i in range(n) for j in range(n)))


def basis_projector(n: int, k: int) -> ComplexMatrix:
    """|k><k| on an n-dimensional space."""
    return ComplexMatrix._wrap(n, n, (1 + 0j if i == j == k else 0j for i in range(n) for j in range(n)))


def matmul(a: ComplexMatrix, b: ComplexMatrix) -> ComplexMatrix:
    if a.cols != b.rows:
        raise DimensionError(f"cannot multiply {a.rows}x{a.cols} by {b.rows}x{b.cols}")
    out = _backend.kernels.matmul(a.entries, b.entries, a.rows, a.cols, b.cols)
    return ComplexMatrix._wrap(a.rows, b.cols, out)


def kron(a: ComplexMatrix, b: ComplexMatrix) -> ComplexMatrix:
    out = _backend.kernels.kron(a.entries, a.rows, a.cols, b.entries, b.rows, b.cols)
    return ComplexMatrix._wrap(a.rows * b.rows, a.cols * b.cols, out)


def kron_all(*mats: ComplexMatrix) -> ComplexMatrix:
    if not mats:
        raise ValueError("kron_all needs at least one matrix")
    out = mats[0]
    for m in mats[1:]:
        out = kron(out, m)
    return out


def dagger(a: ComplexMatrix) -> ComplexMatrix:
    e = a.entries
    r, c = a.rows, a.cols
    return ComplexMatrix._wrap(c, r, (e[i * c + j].conjugate() for j in range(c) for i in range(r)))


def transpose(a: ComplexMatrix) -> ComplexMatrix:
    e = a.entries
    r, c = a.rows, a.cols
    return ComplexMatrix._wrap(c, r, (e[i * c + j] for j in range(c) for i in range(r)))


def trace(a: ComplexMatrix) -> complex:
    if not a.is_square:
        raise DimensionError(f"trace of non-square {a.rows}x{a.cols} matrix")
    n = a.rows
    return sum((a.entries[i * n + i] for i in range(n)), 0j)


def scale(a: ComplexMatrix, alpha: complex) -> ComplexMatrix:
    return ComplexMatrix._wrap(a.rows, a.cols, (alpha * x for x in a.entries))


def _check_same(a: ComplexMatrix, b: ComplexMatrix) -> None:
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch: {a.rows}x{a.cols} vs {b.rows}x{b.cols}")


def add(a: ComplexMatrix, b: ComplexMatrix) -> ComplexMatrix:
    _check_same(a, b)
    return ComplexMatrix._wrap(a.rows, a.cols, (x + y for x, y in zip(a.entries, b.entries)))


def sub(a: ComplexMatrix, b: ComplexMatrix) -> ComplexMatrix:
    _check_same(a, b)
    return ComplexMatrix._wrap(a.rows, a.cols, (x - y for x, y in zip(a.entries, b.entries)))


def conjugate_by(u: ComplexMatrix, m: ComplexMatrix) -> ComplexMatrix:
    """``u @ m @ dagger(u)`` in one kernel call."""
    if not (u.is_square and m.is_square and u.rows == m.rows):
        raise DimensionError(f"cannot conjugate {m.rows}x{m.cols} by {u.rows}x{u.cols}")
    return ComplexMatrix._wrap(m.rows, m.cols, _backend.kernels.sandwich(u.entries, m.entries, u.rows))


def max_abs_diff(a: ComplexMatrix, b: ComplexMatrix) -> float:
    _check_same(a, b)
    return max(abs(x - y) for x, y in zip(a.entries, b.entries))


def allclose(a: ComplexMatrix, b: ComplexMatrix, atol: float = 1e-12) -> bool:
    return a.shape == b.shape and max_abs_diff(a, b) <= atol


def is_hermitian(a: ComplexMatrix, atol: float = 1e-9) -> bool:
    return a.is_square and max_abs_diff(a, dagger(a)) <= atol


def is_unitary(a: ComplexMatrix, atol: float = 1e-10) -> bool:
    return a.is_square and max_abs_diff(matmul(a, dagger(a)), identity(a.rows)) <= atol

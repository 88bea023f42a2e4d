"""Doubled-up matrix algebra.

Every vector in this package is laid out as ``[a; a#]`` (all annihilation
operators first, then their adjoints).  A matrix acting between two such
vectors has the block form ``[[R1, R2], [conj(R2), conj(R1)]]``, which is
equivalent to ``R == Sigma @ conj(R) @ Sigma``.  :class:`DoubledMatrix` stores
only the upper blocks so the structure holds by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import DimensionMismatch, InvalidParameter, StructureViolation

ComplexArray = NDArray[np.complex128]

DEFAULT_TOL = 1e-10


class Check(NamedTuple):
    """Outcome of a residual test: ``passed`` iff ``residual < tol``."""

    passed: bool
    residual: float


def as_complex_matrix(value: ArrayLike, name: str = "matrix") -> ComplexArray:
    """Return ``value`` as a finite, 2-D, read-only complex128 array (copied)."""
    arr = np.array(value, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
        raise DimensionMismatch(f"{name} must be a non-empty 2-D matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidParameter(f"{name} has non-finite entries")
    arr.flags.writeable = False
    return arr


def max_abs(a: ArrayLike) -> float:
    """Max-entry norm; 0.0 for empty input."""
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def dagger(a: ArrayLike) -> ComplexArray:
    return np.conj(np.asarray(a)).T


class StructureConstants(NamedTuple):
    size: int
    J: ComplexArray
    Sigma: ComplexArray


def _readonly(a: np.ndarray) -> ComplexArray:
    a.flags.writeable = False
    return a


def J(m: int) -> ComplexArray:
    """``diag(I_m, -I_m)``."""
    if m < 1:
        raise InvalidParameter(f"structure size must be >= 1, got {m}")
    return _readonly(np.diag(np.r_[np.ones(m), -np.ones(m)]).astype(np.complex128))


def Sigma(m: int) -> ComplexArray:
    """``[[0, I_m], [I_m, 0]]``."""
    if m < 1:
        raise InvalidParameter(f"structure size must be >= 1, got {m}")
    eye = np.eye(m, dtype=np.complex128)
    zero = np.zeros((m, m), dtype=np.complex128)
    return _readonly(np.block([[zero, eye], [eye, zero]]))


def structure_matrices(m: int) -> StructureConstants:
    return StructureConstants(m, J(m), Sigma(m))


@dataclass(frozen=True, eq=False)
class DoubledMatrix:
    """A ``2n x 2m`` matrix ``[[r1, r2], [conj(r2), conj(r1)]]`` held by its upper blocks."""

    r1: ComplexArray
    r2: ComplexArray

    def __post_init__(self):
        r1 = as_complex_matrix(self.r1, "upper-left block")
        r2 = as_complex_matrix(self.r2, "upper-right block")
        if r1.shape != r2.shape:
            raise DimensionMismatch(f"upper blocks differ in shape: {r1.shape} vs {r2.shape}")
        object.__setattr__(self, "r1", r1)
        object.__setattr__(self, "r2", r2)

    @property
    def half_rows(self) -> int:
        return self.r1.shape[0]

    @property
    def half_cols(self) -> int:
        return self.r1.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return 2 * self.half_rows, 2 * self.half_cols

    def expand(self) -> ComplexArray:
        return expand(self)

    def scaled(self, c: float) -> DoubledMatrix:
        """Multiply by a real scalar (complex scalars would break the structure)."""
        if isinstance(c, complex) or np.iscomplexobj(c):
            raise InvalidParameter(f"a doubled matrix can only be scaled by a real number, got {c!r}")
        return DoubledMatrix(self.r1 * float(c), self.r2 * float(c))

    def dagger(self) -> DoubledMatrix:
        # [[A, B], [B#, A#]]^dagger = [[A^dagger, B^T], [B^dagger, A^T]]
        return DoubledMatrix(dagger(self.r1), self.r2.T)

    def __matmul__(self, other: DoubledMatrix) -> DoubledMatrix:
        if not isinstance(other, DoubledMatrix):
            return NotImplemented
        if self.half_cols != other.half_rows:
            raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
        a1, a2, b1, b2 = self.r1, self.r2, other.r1, other.r2
        return DoubledMatrix(a1 @ b1 + a2 @ np.conj(b2), a1 @ b2 + a2 @ np.conj(b1))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DoubledMatrix):
            return NotImplemented
        return (
            self.r1.shape == other.r1.shape
            and np.array_equal(self.r1, other.r1)
            and np.array_equal(self.r2, other.r2)
        )

    def __repr__(self) -> str:
        return f"DoubledMatrix({self.shape[0]}x{self.shape[1]}, r1={self.r1.tolist()}, r2={self.r2.tolist()})"

    @classmethod
    def zeros(cls, n: int, m: int) -> DoubledMatrix:
        z = np.zeros((n, m), dtype=np.complex128)
        return cls(z, z)

    @classmethod
    def identity(cls, n: int) -> DoubledMatrix:
        return cls(np.eye(n), np.zeros((n, n)))

    @classmethod
    def diag(cls, block: ArrayLike) -> DoubledMatrix:
        """``diag(S, conj(S))``: the doubled form of a passive (annihilation-only) map."""
        s = as_complex_matrix(block, "block")
        return cls(s, np.zeros_like(s))


def expand(d: DoubledMatrix) -> ComplexArray:
    return _readonly(np.block([[d.r1, d.r2], [np.conj(d.r2), np.conj(d.r1)]]))


def _check_even(r: np.ndarray) -> None:
    if r.ndim != 2 or r.shape[0] % 2 or r.shape[1] % 2 or 0 in r.shape:
        raise DimensionMismatch(f"doubled matrices need even, non-zero dimensions; got shape {r.shape}")


def doubled_residual(r: ArrayLike) -> float:
    """``max |R - Sigma conj(R) Sigma|``."""
    r = np.asarray(r, dtype=np.complex128)
    _check_even(r)
    p, q = r.shape[0] // 2, r.shape[1] // 2
    mirrored = np.block([[np.conj(r[p:, q:]), np.conj(r[p:, :q])], [np.conj(r[:p, q:]), np.conj(r[:p, :q])]])
    return max_abs(r - mirrored)


def is_doubled(r: ArrayLike, tol: float = DEFAULT_TOL) -> Check:
    res = doubled_residual(r)
    return Check(res < tol, res)


def contract(r: ArrayLike, tol: float = DEFAULT_TOL, *, name: str | None = None) -> DoubledMatrix:
    """Inverse of :func:`expand`; the upper blocks of ``r`` are kept verbatim."""
    r = np.asarray(r, dtype=np.complex128)
    res = doubled_residual(r)
    if not res < tol:
        label = name or "matrix"
        raise StructureViolation(
            f"{label} is not of doubled form (residual {res:.3e} >= tol {tol:.1e})", field=name, residual=res
        )
    p, q = r.shape[0] // 2, r.shape[1] // 2
    return DoubledMatrix(r[:p, :q], r[:p, q:])


def hermitian_residual(a: ArrayLike) -> float:
    a = np.asarray(a)
    return max_abs(a - dagger(a))


def unitary_residual(s: ArrayLike) -> float:
    """``max(|S^dagger S - I|, |S S^dagger - I|)``."""
    s = np.asarray(s)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise DimensionMismatch(f"unitarity needs a square matrix, got shape {s.shape}")
    eye = np.eye(s.shape[0])
    return max(max_abs(dagger(s) @ s - eye), max_abs(s @ dagger(s) - eye))


def sub_block(d: DoubledMatrix, rows: slice, cols: slice) -> DoubledMatrix:
    """Doubled sub-block picking the given annihilation-index ranges."""
    return DoubledMatrix(d.r1[rows, cols], d.r2[rows, cols])


def join_blocks(blocks: list[list[DoubledMatrix]]) -> DoubledMatrix:
    """Assemble doubled blocks indexed by mode groups into one doubled matrix.

    ``blocks[i][j]`` couples row group ``i`` to column group ``j``; the result
    is in the canonical ``[a; a#]`` layout of the concatenated groups.
    """
    return DoubledMatrix(
        np.block([[b.r1 for b in row] for row in blocks]),
        np.block([[b.r2 for b in row] for row in blocks]),
    )

"""Rank, Moore-Penrose inverse and projectors for quaternion matrices.

All decompositions go through the complex adjoint

    chi(A) = [[A1, A2], [-conj(A2), conj(A1)]]      (A = A1 + A2 j)

which is a multiplicative, ``*``-preserving embedding of quaternion
matrices into complex ``2m x 2n`` matrices.  Singular values of ``chi(A)``
come in equal pairs; the quaternion singular values are every second one.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ShapeError
from .quat_matrix import QuatMatrix, hstack, vstack, zeros

__all__ = [
    "RankResult",
    "Projectors",
    "Decomposition",
    "complex_adjoint",
    "from_adjoint",
    "default_tol",
    "decompose",
    "rank",
    "pinv",
    "projectors",
    "marsaglia_styan_check",
]

RANK_EPS = 2.0 ** -40


def complex_adjoint(a: QuatMatrix) -> np.ndarray:
    a1, a2 = a.complex_parts()
    return np.block([[a1, a2], [-a2.conj(), a1.conj()]])


def from_adjoint(c: np.ndarray, rows: int, cols: int) -> QuatMatrix:
    """Recover ``A`` from a (possibly slightly perturbed) adjoint image.

    Both copies of each block are averaged, which projects onto the set of
    adjoint-structured matrices.
    """
    c = np.asarray(c)
    if c.shape != (2 * rows, 2 * cols):
        raise ShapeError(f"adjoint of shape {c.shape} does not match {rows}x{cols}")
    a1 = 0.5 * (c[:rows, :cols] + c[rows:, cols:].conj())
    a2 = 0.5 * (c[:rows, cols:] - c[rows:, :cols].conj())
    return QuatMatrix.from_complex(a1, a2)


@dataclass(frozen=True)
class RankResult:
    """Numerical rank with the data needed to audit it."""

    rank: int
    singular_values: tuple[float, ...]
    tol_used: float

    @property
    def smallest_kept(self) -> float | None:
        return self.singular_values[self.rank - 1] if self.rank else None

    @property
    def largest_dropped(self) -> float | None:
        sv = self.singular_values
        return sv[self.rank] if self.rank < len(sv) else None

    @property
    def margin(self) -> float:
        """Factor by which the nearest singular value clears the threshold.

        ``inf`` when no singular value competes with the threshold (empty
        or exactly zero spectrum on the dropped side, nothing on the kept).
        """
        factors = []
        if self.smallest_kept is not None and self.tol_used > 0:
            factors.append(self.smallest_kept / self.tol_used)
        if self.largest_dropped is not None and self.largest_dropped > 0:
            factors.append(self.tol_used / self.largest_dropped)
        return min(factors) if factors else float("inf")


@dataclass(frozen=True)
class Projectors:
    L: QuatMatrix  # I - pinv(A) A, acts on the column space side (n x n)
    R: QuatMatrix  # I - A pinv(A), acts on the row space side (m x m)


def default_tol(a: QuatMatrix, sigma_max: float | None = None) -> float:
    """``max(rows, cols) * sigma_max * 2**-40``."""
    if a.size == 0:
        return 0.0
    if sigma_max is None:
        sigma_max = float(np.linalg.norm(complex_adjoint(a), 2))
    return max(a.rows, a.cols) * sigma_max * RANK_EPS


class Decomposition:
    """Thresholded SVD of ``chi(A)`` shared by rank, pinv and projectors."""

    def __init__(self, a: QuatMatrix, tol: float | None = None):
        self.matrix = a
        m, n = a.shape
        if a.size == 0:
            self.u = np.eye(2 * m, dtype=complex)
            self.s = np.zeros(0)
            self.vh = np.eye(2 * n, dtype=complex)
            self.tol = 0.0 if tol is None else float(tol)
            self.rank = 0
            return
        u, s, vh = np.linalg.svd(complex_adjoint(a), full_matrices=True)
        self.u, self.s, self.vh = u, s, vh
        self.tol = default_tol(a, s[0]) if tol is None else float(tol)
        # quaternion singular values are the even-indexed entries of the pairs
        self.rank = int(np.count_nonzero(s[::2] > self.tol))

    @property
    def quaternion_singular_values(self) -> np.ndarray:
        return self.s[::2]

    def rank_result(self) -> RankResult:
        return RankResult(
            rank=self.rank,
            singular_values=tuple(float(v) for v in self.quaternion_singular_values),
            tol_used=self.tol,
        )

    def pair_gap(self) -> float:
        """Largest mismatch inside a singular value pair."""
        s = self.s
        if s.size == 0:
            return 0.0
        return float(np.max(np.abs(s[0::2] - s[1::2])))

    def pinv(self) -> QuatMatrix:
        m, n = self.matrix.shape
        r2 = 2 * self.rank
        if r2 == 0:
            return zeros(n, m)
        u = self.u[:, :r2]
        v = self.vh[:r2].conj().T
        c = (v / self.s[:r2]) @ u.conj().T
        return from_adjoint(c, n, m)

    def projectors(self) -> Projectors:
        m, n = self.matrix.shape
        r2 = 2 * self.rank
        vn = self.vh[r2:].conj().T
        un = self.u[:, r2:]
        return Projectors(
            L=from_adjoint(vn @ vn.conj().T, n, n),
            R=from_adjoint(un @ un.conj().T, m, m),
        )


def decompose(a: QuatMatrix, tol: float | None = None) -> Decomposition:
    return Decomposition(a, tol)


def rank(a: QuatMatrix, tol: float | None = None) -> RankResult:
    """Numerical rank of ``a``; ``tol`` is an absolute singular-value cutoff.

    >>> from quatsylv.quat_matrix import identity
    >>> rank(identity(4)).rank
    4
    """
    return Decomposition(a, tol).rank_result()


def pinv(a: QuatMatrix, tol: float | None = None) -> QuatMatrix:
    return Decomposition(a, tol).pinv()


def projectors(a: QuatMatrix, tol: float | None = None) -> Projectors:
    return Decomposition(a, tol).projectors()


class MarsagliaStyan(NamedTuple):
    """Ranks in the two Marsaglia-Styan identities.

    ``r(A) + r(R_A B) == r(B) + r(R_B A) == r([A B])`` and
    ``r(A) + r(C L_A) == r(C) + r(A L_C) == r([A; C])``.
    """

    lhs1: int
    alt1: int
    rhs1: int
    lhs2: int
    alt2: int
    rhs2: int

    @property
    def holds(self) -> bool:
        return self.lhs1 == self.alt1 == self.rhs1 and self.lhs2 == self.alt2 == self.rhs2


def marsaglia_styan_check(a: QuatMatrix, b: QuatMatrix, c: QuatMatrix,
                          tol: float | None = None) -> MarsagliaStyan:
    if a.rows != b.rows:
        raise ShapeError(f"A and B need equal row counts, got {a.rows} and {b.rows}")
    if a.cols != c.cols:
        raise ShapeError(f"A and C need equal column counts, got {a.cols} and {c.cols}")
    da, db, dc = (Decomposition(x, tol) for x in (a, b, c))
    pa, pb, pc = da.projectors(), db.projectors(), dc.projectors()

    def r(x):
        return rank(x, tol).rank

    return MarsagliaStyan(
        lhs1=da.rank + r(pa.R @ b),
        alt1=db.rank + r(pb.R @ a),
        rhs1=r(hstack([a, b])),
        lhs2=da.rank + r(c @ pa.L),
        alt2=dc.rank + r(a @ pc.L),
        rhs2=r(vstack([a, c])),
    )

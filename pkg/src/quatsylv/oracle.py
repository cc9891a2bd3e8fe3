"""Brute-force real linear certificate for quaternion matrix systems.

Every real coordinate of every unknown is set to one in turn, the system
map is applied, and the flattened image becomes a column of a real matrix
``M``.  Solvability is then a plain real rank question about ``[M b]``.

The quaternion products here come from a multiplication table written
out from ``i^2 = j^2 = k^2 = ijk = -1`` and are evaluated with ``einsum``,
so nothing in this module shares arithmetic with the library's own
matrix product.  The oracle is a test and CLI device, not part of the
solving API.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .quat_matrix import QuatMatrix
from .sylvester import SylvesterSystem, SystemSolution

__all__ = [
    "RealLinearSystem",
    "UnknownBlock",
    "realify",
    "oracle_consistent",
    "oracle_solve",
    "unpack",
    "MULT_TABLE",
]


def _mult_table() -> np.ndarray:
    # basis order 1, i, j, k; table[a, b] = (sign, index) of e_a e_b
    prod = {
        (0, 0): (1, 0), (0, 1): (1, 1), (0, 2): (1, 2), (0, 3): (1, 3),
        (1, 0): (1, 1), (1, 1): (-1, 0), (1, 2): (1, 3), (1, 3): (-1, 2),
        (2, 0): (1, 2), (2, 1): (-1, 3), (2, 2): (-1, 0), (2, 3): (1, 1),
        (3, 0): (1, 3), (3, 1): (1, 2), (3, 2): (-1, 1), (3, 3): (-1, 0),
    }
    c = np.zeros((4, 4, 4))
    for (a, b), (sign, out) in prod.items():
        c[a, b, out] = sign
    return c


MULT_TABLE = _mult_table()


def _mm(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix product of component arrays; ``b`` may carry a leading batch axis."""
    if b.ndim == 4:
        return np.einsum("rli,nlsj,ijk->nrsk", a, b, MULT_TABLE, optimize=True)
    return np.einsum("rli,lsj,ijk->rsk", a, b, MULT_TABLE, optimize=True)


def _mm_left(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Batched ``a @ b`` where ``a`` carries the leading batch axis."""
    return np.einsum("nrli,lsj,ijk->nrsk", a, b, MULT_TABLE, optimize=True)


def _phi_t(inv_matrix: np.ndarray, a: np.ndarray) -> np.ndarray:
    """Involution applied entrywise to the transpose (batched or not)."""
    swapped = np.swapaxes(a, -3, -2)
    return swapped @ inv_matrix.T


@dataclass(frozen=True)
class UnknownBlock:
    name: str  # "X", "Y" or "Z"
    index: int  # 0-based
    shape: tuple[int, int]
    start: int  # first column in M

    @property
    def width(self) -> int:
        return self.shape[0] * self.shape[1] * 4


@dataclass(frozen=True)
class RealLinearSystem:
    M: np.ndarray
    b: np.ndarray
    layout: tuple[UnknownBlock, ...]
    kind: str = "general"  # or "phi"

    @property
    def n_unknowns(self) -> int:
        return self.M.shape[1]


def _basis(shape) -> np.ndarray:
    r, c = shape
    n = r * c * 4
    return np.eye(n).reshape(n, r, c, 4)


def _realify_general(sys: SylvesterSystem) -> RealLinearSystem:
    k = sys.k
    layout = []
    start = 0
    for name, shapes in (
        ("X", [eq.x_shape for eq in sys]),
        ("Y", [eq.y_shape for eq in sys]),
        ("Z", sys.z_shapes),
    ):
        for i, s in enumerate(shapes):
            blk = UnknownBlock(name, i, tuple(s), start)
            layout.append(blk)
            start += blk.width
    row_sizes = [eq.p * eq.q * 4 for eq in sys]
    row_starts = np.concatenate([[0], np.cumsum(row_sizes)]).astype(int)
    M = np.zeros((int(row_starts[-1]), start))

    def put(eq_idx, blk, images):
        rows = slice(row_starts[eq_idx], row_starts[eq_idx + 1])
        cols = slice(blk.start, blk.start + blk.width)
        M[rows, cols] += images.reshape(images.shape[0], -1).T

    for blk in layout:
        basis = _basis(blk.shape)
        if blk.width == 0:
            continue
        i = blk.index
        if blk.name == "X":
            eq = sys[i]
            put(i, blk, _mm(eq.A.data, basis))
        elif blk.name == "Y":
            eq = sys[i]
            put(i, blk, _mm_left(basis, eq.B.data))
        else:
            if i < k:  # Z_i as the C Z D term of equation i
                eq = sys[i]
                put(i, blk, _mm_left(_mm(eq.C.data, basis), eq.D.data))
            if i >= 1:  # Z_i as the F Z G term of equation i-1
                eq = sys[i - 1]
                put(i - 1, blk, _mm_left(_mm(eq.F.data, basis), eq.G.data))
    b = np.concatenate([eq.E.data.reshape(-1) for eq in sys]) if k else np.zeros(0)
    return RealLinearSystem(M, b, tuple(layout), "general")


def _realify_phi(ps) -> RealLinearSystem:
    inv = ps.inv.matrix
    k = ps.k
    layout = []
    start = 0
    for i, eq in enumerate(ps.equations):
        blk = UnknownBlock("X", i, (eq.A.cols, eq.p), start)
        layout.append(blk)
        start += blk.width
    for i, s in enumerate(ps.z_shapes):
        blk = UnknownBlock("Z", i, tuple(s), start)
        layout.append(blk)
        start += blk.width
    eq_sizes = [eq.p * eq.p * 4 for eq in ps.equations]
    sym_sizes = [s[0] * s[1] * 4 for s in ps.z_shapes]
    sizes = eq_sizes + sym_sizes
    row_starts = np.concatenate([[0], np.cumsum(sizes)]).astype(int)
    M = np.zeros((int(row_starts[-1]), start))

    def put(row_block, blk, images):
        rows = slice(row_starts[row_block], row_starts[row_block + 1])
        cols = slice(blk.start, blk.start + blk.width)
        M[rows, cols] += images.reshape(images.shape[0], -1).T

    for blk in layout:
        if blk.width == 0:
            continue
        basis = _basis(blk.shape)
        i = blk.index
        if blk.name == "X":
            eq = ps.equations[i]
            ax = _mm(eq.A.data, basis)
            put(i, blk, ax + _phi_t(inv, ax))
            continue
        if i < k:
            eq = ps.equations[i]
            put(i, blk, _mm_left(_mm(eq.C.data, basis), _phi_t(inv, eq.C.data)))
        if i >= 1:
            eq = ps.equations[i - 1]
            put(i - 1, blk, _mm_left(_mm(eq.F.data, basis), _phi_t(inv, eq.F.data)))
        # symmetry rows Z - Z_phi = 0
        put(k + i, blk, basis - _phi_t(inv, basis))
    b = np.concatenate(
        [eq.E.data.reshape(-1) for eq in ps.equations] + [np.zeros(s) for s in sym_sizes]
    )
    return RealLinearSystem(M, b, tuple(layout), "phi")


def realify(sys) -> RealLinearSystem:
    """Real matrix ``M`` and vector ``b`` with ``M vec(unknowns) = b``.

    Accepts a :class:`SylvesterSystem` or a :class:`~quatsylv.phi_systems.PhiSystem`;
    the latter gains rows forcing every ``Z_i`` to be phi-Hermitian.
    """
    if isinstance(sys, SylvesterSystem):
        return _realify_general(sys)
    return _realify_phi(sys)


def _rank(a: np.ndarray, tol: float) -> int:
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    return int(np.count_nonzero(s > tol))


def oracle_tol(rls: RealLinearSystem) -> float:
    aug = np.column_stack([rls.M, rls.b])
    if aug.size == 0:
        return 0.0
    return max(aug.shape) * float(np.linalg.norm(aug, 2)) * 2.0 ** -40


def oracle_consistent(rls: RealLinearSystem, tol: float | None = None) -> bool:
    """``rank([M b]) == rank(M)`` with a shared absolute threshold."""
    tol = oracle_tol(rls) if tol is None else tol
    return _rank(rls.M, tol) == _rank(np.column_stack([rls.M, rls.b]), tol)


def oracle_solve(rls: RealLinearSystem) -> tuple[np.ndarray, float]:
    """Minimum-norm least-squares solution and its residual norm."""
    if rls.M.size == 0:
        return np.zeros(rls.M.shape[1]), float(np.linalg.norm(rls.b))
    x, *_ = np.linalg.lstsq(rls.M, rls.b, rcond=None)
    return x, float(np.linalg.norm(rls.M @ x - rls.b))


def unpack(rls: RealLinearSystem, x: np.ndarray) -> Union[SystemSolution, dict]:
    """Split an oracle vector back into quaternion matrices.

    General systems give a :class:`SystemSolution`; phi systems a dict with
    ``"X"`` and ``"Z"`` lists.
    """
    parts: dict[str, list[QuatMatrix]] = {"X": [], "Y": [], "Z": []}
    for blk in rls.layout:
        vals = x[blk.start:blk.start + blk.width].reshape(blk.shape[0], blk.shape[1], 4)
        parts[blk.name].append(QuatMatrix(vals))
    if rls.kind == "phi":
        return {"X": parts["X"], "Z": parts["Z"]}
    return SystemSolution(tuple(parts["X"]), tuple(parts["Y"]), tuple(parts["Z"]))

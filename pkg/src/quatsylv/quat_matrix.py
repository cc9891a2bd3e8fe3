"""Dense quaternion matrices and block assembly.

A :class:`QuatMatrix` wraps a read-only float64 array of shape
``(rows, cols, 4)`` holding the ``w, x, y, z`` components of each entry.
Zero-sized matrices are ordinary values and flow through every operation.

Products are evaluated through the split ``A = A1 + A2 j`` with complex
``A1 = w + x i`` and ``A2 = y + z i``, using ``j z = conj(z) j``::

    (A1 + A2 j)(B1 + B2 j) = (A1 B1 - A2 conj(B2)) + (A1 B2 + A2 conj(B1)) j
"""
from __future__ import annotations

from dataclasses import dataclass
from numbers import Real
from typing import Sequence, Union

import numpy as np

from .errors import FormatError, NonSquare, ShapeError
from .quat_core import Involution, Quaternion, hamilton

__all__ = [
    "QuatMatrix",
    "Zero",
    "Signed",
    "BlockSpec",
    "matmul",
    "conj_transpose",
    "phi_transpose",
    "assemble_block",
    "split_block",
    "fro_norm",
    "hstack",
    "vstack",
    "zeros",
    "identity",
]


class QuatMatrix:
    """Immutable dense ``rows x cols`` matrix over the quaternions."""

    __slots__ = ("_data",)
    __array_priority__ = 1000

    def __init__(self, data):
        arr = np.array(data, dtype=float)
        if arr.ndim != 3 or arr.shape[2] != 4:
            raise ShapeError(f"expected component array of shape (m, n, 4), got {arr.shape}")
        arr.flags.writeable = False
        self._data = arr

    # -- construction -------------------------------------------------
    @classmethod
    def from_complex(cls, a1, a2) -> QuatMatrix:
        """Build ``a1 + a2 j`` from two complex arrays of equal shape."""
        a1 = np.asarray(a1, dtype=complex)
        a2 = np.asarray(a2, dtype=complex)
        return cls(np.stack([a1.real, a1.imag, a2.real, a2.imag], axis=-1))

    @classmethod
    def from_real(cls, a) -> QuatMatrix:
        a = np.atleast_2d(np.asarray(a, dtype=float))
        out = np.zeros(a.shape + (4,))
        out[..., 0] = a
        return cls(out)

    @classmethod
    def from_entries(cls, rows: Sequence[Sequence[Quaternion]]) -> QuatMatrix:
        arr = np.array([[q.to_array() for q in row] for row in rows], dtype=float)
        if arr.size == 0:
            arr = arr.reshape(len(rows), 0, 4)
        return cls(arr)

    @classmethod
    def random(cls, rows: int, cols: int, rng: np.random.Generator, rank=None) -> QuatMatrix:
        """Standard normal components; ``rank`` caps the rank via a product."""
        if rank is None or rank >= min(rows, cols):
            return cls(rng.standard_normal((rows, cols, 4)))
        left = cls(rng.standard_normal((rows, rank, 4)))
        right = cls(rng.standard_normal((rank, cols, 4)))
        return left @ right

    # -- basic attributes --------------------------------------------
    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def shape(self) -> tuple[int, int]:
        return self._data.shape[:2]

    @property
    def rows(self) -> int:
        return self._data.shape[0]

    @property
    def cols(self) -> int:
        return self._data.shape[1]

    @property
    def size(self) -> int:
        return self.rows * self.cols

    def complex_parts(self) -> tuple[np.ndarray, np.ndarray]:
        d = self._data
        return d[..., 0] + 1j * d[..., 1], d[..., 2] + 1j * d[..., 3]

    def __getitem__(self, idx) -> Union[Quaternion, QuatMatrix]:
        if isinstance(idx, tuple) and len(idx) == 2 and all(
            isinstance(i, (int, np.integer)) for i in idx
        ):
            return Quaternion.from_array(self._data[idx])
        if not (isinstance(idx, tuple) and len(idx) == 2):
            raise IndexError("QuatMatrix needs a (row, col) index")
        r, c = idx
        r = slice(r, r + 1) if isinstance(r, (int, np.integer)) else r
        c = slice(c, c + 1) if isinstance(c, (int, np.integer)) else c
        return QuatMatrix(self._data[r, c])

    def __repr__(self) -> str:
        return f"QuatMatrix({self.rows}x{self.cols})"

    # -- arithmetic --------------------------------------------------
    def _check_same(self, other, op):
        if not isinstance(other, QuatMatrix):
            return False
        if other.shape != self.shape:
            raise ShapeError(f"cannot {op} {self.shape} and {other.shape}")
        return True

    def __add__(self, other):
        if not self._check_same(other, "add"):
            return NotImplemented
        return QuatMatrix(self._data + other._data)

    def __sub__(self, other):
        if not self._check_same(other, "subtract"):
            return NotImplemented
        return QuatMatrix(self._data - other._data)

    def __neg__(self):
        return QuatMatrix(-self._data)

    def __mul__(self, scalar):
        if isinstance(scalar, Real):
            return QuatMatrix(self._data * float(scalar))
        if isinstance(scalar, Quaternion):
            return QuatMatrix(hamilton(self._data, scalar.to_array()))
        return NotImplemented

    def __rmul__(self, scalar):
        if isinstance(scalar, Real):
            return QuatMatrix(self._data * float(scalar))
        if isinstance(scalar, Quaternion):
            return QuatMatrix(hamilton(scalar.to_array(), self._data))
        return NotImplemented

    def __truediv__(self, scalar):
        if isinstance(scalar, Real):
            return QuatMatrix(self._data / float(scalar))
        return NotImplemented

    def __matmul__(self, other):
        if not isinstance(other, QuatMatrix):
            return NotImplemented
        return matmul(self, other)

    @property
    def H(self) -> QuatMatrix:
        return conj_transpose(self)

    def phi(self, inv: Involution) -> QuatMatrix:
        return phi_transpose(inv, self)

    def norm(self) -> float:
        return fro_norm(self)

    def allclose(self, other: QuatMatrix, atol: float = 1e-10, rtol: float = 0.0) -> bool:
        if self.shape != other.shape:
            return False
        return bool(np.allclose(self._data, other._data, atol=atol, rtol=rtol))

    def __eq__(self, other):
        if not isinstance(other, QuatMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self._data, other._data))

    __hash__ = None

    # -- serialization -----------------------------------------------
    def to_json(self) -> dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "data": [[[float(v) for v in entry] for entry in row] for row in self._data],
        }

    @classmethod
    def from_json(cls, obj, field: str = "") -> QuatMatrix:
        """Parse ``{"rows": m, "cols": n, "data": [[[w,x,y,z], ...], ...]}``."""
        if not isinstance(obj, dict):
            raise FormatError("matrix must be an object", field)
        for key in ("rows", "cols", "data"):
            if key not in obj:
                raise FormatError(f"missing key '{key}'", field)
        rows, cols, data = obj["rows"], obj["cols"], obj["data"]
        for key, val in (("rows", rows), ("cols", cols)):
            if isinstance(val, bool) or not isinstance(val, int) or val < 0:
                raise FormatError("must be a nonnegative integer", _join(field, key))
        if not isinstance(data, list) or len(data) != rows:
            raise FormatError(f"expected {rows} rows", _join(field, "data"))
        out = np.zeros((rows, cols, 4))
        for i, row in enumerate(data):
            where = f"{_join(field, 'data')}[{i}]"
            if not isinstance(row, list) or len(row) != cols:
                raise FormatError(f"ragged row: expected {cols} entries", where)
            for j, entry in enumerate(row):
                if (
                    not isinstance(entry, list)
                    or len(entry) != 4
                    or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in entry)
                ):
                    raise FormatError("entry must be [w, x, y, z]", f"{where}[{j}]")
                out[i, j] = entry
        if not np.all(np.isfinite(out)):
            raise FormatError("non-finite entry", _join(field, "data"))
        return cls(out)


def _join(field: str, key: str) -> str:
    return f"{field}.{key}" if field else key


def zeros(rows: int, cols: int) -> QuatMatrix:
    return QuatMatrix(np.zeros((rows, cols, 4)))


def identity(n: int) -> QuatMatrix:
    out = np.zeros((n, n, 4))
    out[np.arange(n), np.arange(n), 0] = 1.0
    return QuatMatrix(out)


def matmul(a: QuatMatrix, b: QuatMatrix) -> QuatMatrix:
    if a.cols != b.rows:
        raise ShapeError(f"matmul: {a.shape} @ {b.shape}")
    a1, a2 = a.complex_parts()
    b1, b2 = b.complex_parts()
    p1 = a1 @ b1 - a2 @ b2.conj()
    p2 = a1 @ b2 + a2 @ b1.conj()
    return QuatMatrix.from_complex(p1, p2)


def conj_transpose(a: QuatMatrix) -> QuatMatrix:
    d = np.swapaxes(a.data, 0, 1).copy()
    d[..., 1:] *= -1.0
    return QuatMatrix(d)


def phi_transpose(inv: Involution, a: QuatMatrix) -> QuatMatrix:
    """``A_phi``: the involution applied entrywise to the transpose."""
    return QuatMatrix(inv.apply_components(np.swapaxes(a.data, 0, 1)))


def fro_norm(a: QuatMatrix) -> float:
    return float(np.sqrt(np.sum(a.data**2)))


def hstack(mats: Sequence[QuatMatrix]) -> QuatMatrix:
    if not mats:
        raise ShapeError("hstack of nothing")
    rows = {m.rows for m in mats}
    if len(rows) != 1:
        raise ShapeError(f"hstack: row counts differ {sorted(rows)}")
    return QuatMatrix(np.concatenate([m.data for m in mats], axis=1))


def vstack(mats: Sequence[QuatMatrix]) -> QuatMatrix:
    if not mats:
        raise ShapeError("vstack of nothing")
    cols = {m.cols for m in mats}
    if len(cols) != 1:
        raise ShapeError(f"vstack: column counts differ {sorted(cols)}")
    return QuatMatrix(np.concatenate([m.data for m in mats], axis=0))


def require_square(a: QuatMatrix, what: str = "matrix") -> None:
    if a.rows != a.cols:
        raise NonSquare(f"{what} must be square, got {a.rows}x{a.cols}")


# -- block assembly ----------------------------------------------------

@dataclass(frozen=True)
class Zero:
    """Zero block; dimensions are inferred from the grid unless given."""

    rows: int | None = None
    cols: int | None = None


@dataclass(frozen=True)
class Signed:
    """``sign * matrix`` with ``sign`` in {+1, -1}."""

    sign: int
    matrix: QuatMatrix

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign}")


Cell = Union[QuatMatrix, Signed, Zero, None]


@dataclass(frozen=True)
class BlockSpec:
    """Rectangular grid of cells; ``None`` is shorthand for ``Zero()``."""

    grid: tuple[tuple[Cell, ...], ...]

    def __init__(self, grid):
        object.__setattr__(self, "grid", tuple(tuple(row) for row in grid))

    def block_sizes(self) -> tuple[list[int], list[int]]:
        """Heights of the grid rows and widths of the grid columns."""
        grid = self.grid
        if not grid:
            return [], []
        ncols = len(grid[0])
        if any(len(row) != ncols for row in grid):
            raise ShapeError("block grid is not rectangular")
        heights: list[int | None] = [None] * len(grid)
        widths: list[int | None] = [None] * ncols

        def settle(store, idx, value, what):
            if value is None:
                return
            if store[idx] is None:
                store[idx] = value
            elif store[idx] != value:
                raise ShapeError(f"{what} {idx}: conflicting sizes {store[idx]} and {value}")

        for i, row in enumerate(grid):
            for j, cell in enumerate(row):
                r, c = _cell_shape(cell)
                settle(heights, i, r, "block row")
                settle(widths, j, c, "block column")
        if None in heights:
            raise ShapeError(f"cannot infer height of block row {heights.index(None)}")
        if None in widths:
            raise ShapeError(f"cannot infer width of block column {widths.index(None)}")
        return heights, widths


def _cell_shape(cell):
    if cell is None:
        return None, None
    if isinstance(cell, Zero):
        return cell.rows, cell.cols
    if isinstance(cell, Signed):
        return cell.matrix.shape
    if isinstance(cell, QuatMatrix):
        return cell.shape
    raise TypeError(f"unsupported block cell {type(cell).__name__}")


def assemble_block(spec: BlockSpec | Sequence[Sequence[Cell]]) -> QuatMatrix:
    """Concatenate the cells of ``spec`` into a single matrix."""
    if not isinstance(spec, BlockSpec):
        spec = BlockSpec(spec)
    heights, widths = spec.block_sizes()
    out = np.zeros((sum(heights), sum(widths), 4))
    r0 = 0
    for row, h in zip(spec.grid, heights):
        c0 = 0
        for cell, w in zip(row, widths):
            if isinstance(cell, QuatMatrix):
                out[r0:r0 + h, c0:c0 + w] = cell.data
            elif isinstance(cell, Signed):
                out[r0:r0 + h, c0:c0 + w] = cell.sign * cell.matrix.data
            c0 += w
        r0 += h
    return QuatMatrix(out)


def split_block(a: QuatMatrix, heights: Sequence[int], widths: Sequence[int]) -> list[list[QuatMatrix]]:
    """Inverse of :func:`assemble_block` for known block sizes."""
    if sum(heights) != a.rows or sum(widths) != a.cols:
        raise ShapeError(f"block sizes {list(heights)} x {list(widths)} do not tile {a.shape}")
    rs = np.concatenate([[0], np.cumsum(heights)]).astype(int)
    cs = np.concatenate([[0], np.cumsum(widths)]).astype(int)
    return [
        [a[rs[i]:rs[i + 1], cs[j]:cs[j + 1]] for j in range(len(widths))]
        for i in range(len(heights))
    ]

"""Coupled systems with phi-Hermitian structure.

Equation ``i`` reads

    A_i X_i + (A_i X_i)_phi + C_i Z_i (C_i)_phi + F_i Z_{i+1} (F_i)_phi = E_i

with every ``E_i`` and every ``Z_i`` phi-Hermitian.  Substituting
``B = A_phi``, ``D = C_phi`` and ``G = F_phi`` gives a general chained
system; any solution of that system can be averaged with its
phi-transpose to give a solution of the structured one.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import FormatError, InvalidAxis, NonSquare, ShapeError
from .quat_core import Involution, involution_from_axis
from .quat_matrix import QuatMatrix, phi_transpose, require_square
from .sylvester import (
    TOL_RES,
    ConsistencyReport,
    Family,
    FourTermEquation,
    SylvesterSystem,
    check_system,
    solve_system,
)

log = logging.getLogger(__name__)

__all__ = [
    "PhiEquation",
    "PhiSystem",
    "PhiSolution",
    "LISTED_FAMILIES",
    "phi_hermitian_check",
    "to_general_system",
    "check_phi_system",
    "strict_disagreement",
    "solve_phi_system",
    "phi_residuals",
    "random_phi_hermitian",
]

HERMITIAN_TOL = 1e-12
# families whose phi analogues the structured rank theorem lists; the rest
# are phi-transpose images of these or self-dual
LISTED_FAMILIES = (Family.EQ2a, Family.EQ3a, Family.EQ4, Family.EQ5)


def phi_hermitian_check(inv: Involution, a: QuatMatrix, rtol: float = 1e-10) -> tuple[bool, float]:
    """Whether ``a == a_phi`` and the defect ``||a - a_phi||_F``.

    >>> from quatsylv.quat_matrix import identity
    >>> from quatsylv.quat_core import involution_from_axis
    >>> phi_hermitian_check(involution_from_axis([0, 0, 1]), identity(2))
    (True, 0.0)
    """
    if a.rows != a.cols:
        raise NonSquare(f"phi-Hermitian test needs a square matrix, got {a.rows}x{a.cols}")
    defect = (a - phi_transpose(inv, a)).norm()
    return defect <= rtol * (1.0 + a.norm()), defect


@dataclass(frozen=True)
class PhiEquation:
    """Coefficients ``A`` (p x a), ``C`` (p x c), ``F`` (p x f) and ``E`` (p x p)."""

    A: QuatMatrix
    C: QuatMatrix
    F: QuatMatrix
    E: QuatMatrix

    def __post_init__(self):
        require_square(self.E, "E")
        p = self.E.rows
        for name in ("A", "C", "F"):
            if getattr(self, name).rows != p:
                raise ShapeError(f"{name} has {getattr(self, name).rows} rows, E has {p}")

    @property
    def p(self) -> int:
        return self.E.rows

    def with_rhs(self, E: QuatMatrix) -> PhiEquation:
        return PhiEquation(self.A, self.C, self.F, E)

    def to_json(self) -> dict:
        return {n: getattr(self, n).to_json() for n in "ACFE"}


@dataclass(frozen=True)
class PhiSystem:
    inv: Involution
    equations: tuple[PhiEquation, ...]

    def __init__(self, inv: Involution, equations: Sequence[PhiEquation]):
        eqs = tuple(equations)
        if not eqs:
            raise ShapeError("a system needs at least one equation")
        for i in range(len(eqs) - 1):
            f, c = eqs[i].F.cols, eqs[i + 1].C.cols
            if f != c:
                raise ShapeError(
                    f"shared unknown Z_{i + 2}: equation {i + 1} implies size {f}, "
                    f"equation {i + 2} implies size {c}"
                )
        for i, eq in enumerate(eqs):
            defect = (eq.E - phi_transpose(inv, eq.E)).norm()
            if defect > HERMITIAN_TOL * eq.E.norm():
                raise ShapeError(f"E_{i + 1} is not phi-Hermitian (defect {defect:.3g})")
        object.__setattr__(self, "inv", inv)
        object.__setattr__(self, "equations", eqs)

    @property
    def k(self) -> int:
        return len(self.equations)

    def __getitem__(self, i) -> PhiEquation:
        return self.equations[i]

    def __iter__(self):
        return iter(self.equations)

    @property
    def z_shapes(self) -> list[tuple[int, int]]:
        c = self.equations[0].C.cols
        return [(c, c)] + [(eq.F.cols, eq.F.cols) for eq in self.equations]

    def with_rhs(self, index: int, E: QuatMatrix) -> PhiSystem:
        eqs = list(self.equations)
        eqs[index] = eqs[index].with_rhs(E)
        return PhiSystem(self.inv, eqs)

    def to_json(self) -> dict:
        return {
            "axis": self.inv.to_list(),
            "k": self.k,
            "equations": [eq.to_json() for eq in self.equations],
        }

    @classmethod
    def from_json(cls, obj) -> PhiSystem:
        if not isinstance(obj, dict):
            raise FormatError("system must be an object")
        axis = obj.get("axis")
        if not isinstance(axis, list):
            raise FormatError("expected a list of three numbers", "axis")
        try:
            inv = involution_from_axis(axis)
        except (InvalidAxis, TypeError, ValueError) as exc:
            raise FormatError(str(exc), "axis") from None
        k = obj.get("k")
        if isinstance(k, bool) or not isinstance(k, int) or k < 1:
            raise FormatError("must be a positive integer", "k")
        raw = obj.get("equations")
        if not isinstance(raw, list) or len(raw) != k:
            raise FormatError(f"expected a list of {k} equations", "equations")
        eqs = []
        for i, e in enumerate(raw):
            where = f"equations[{i}]"
            if not isinstance(e, dict):
                raise FormatError("equation must be an object", where)
            mats = {}
            for name in "ACFE":
                if name not in e:
                    raise FormatError("missing matrix", f"{where}.{name}")
                mats[name] = QuatMatrix.from_json(e[name], f"{where}.{name}")
            try:
                eqs.append(PhiEquation(**mats))
            except ShapeError as exc:
                raise FormatError(str(exc), where) from None
        try:
            return cls(inv, eqs)
        except ShapeError as exc:
            raise FormatError(str(exc), "equations") from None

    @classmethod
    def zero(cls, inv: Involution, k: int, p: int = 2, a: int = 2, c: int = 2) -> PhiSystem:
        from .quat_matrix import zeros

        eq = PhiEquation(zeros(p, a), zeros(p, c), zeros(p, c), zeros(p, p))
        return cls(inv, [eq] * k)


@dataclass(frozen=True)
class PhiSolution:
    X: tuple[QuatMatrix, ...]
    Z: tuple[QuatMatrix, ...]
    residuals: tuple[float, ...] = ()
    symmetry_defects: tuple[float, ...] = ()

    @property
    def k(self) -> int:
        return len(self.X)

    def to_json(self) -> dict:
        return {
            "X": [x.to_json() for x in self.X],
            "Z": [z.to_json() for z in self.Z],
            "residuals": [float(r) for r in self.residuals],
            "symmetry_defects": [float(d) for d in self.symmetry_defects],
        }

    @classmethod
    def from_json(cls, obj) -> PhiSolution:
        if not isinstance(obj, dict):
            raise FormatError("solution must be an object")
        parts = {}
        for key in ("X", "Z"):
            val = obj.get(key)
            if not isinstance(val, list):
                raise FormatError("expected a list of matrices", key)
            parts[key] = tuple(QuatMatrix.from_json(m, f"{key}[{i}]") for i, m in enumerate(val))
        if len(parts["Z"]) != len(parts["X"]) + 1:
            raise FormatError("need k X's and k+1 Z's", "Z")
        return cls(parts["X"], parts["Z"])


def to_general_system(ps: PhiSystem) -> SylvesterSystem:
    """General system with ``B = A_phi``, ``D = C_phi`` and ``G = F_phi``."""
    phi = lambda m: phi_transpose(ps.inv, m)  # noqa: E731
    return SylvesterSystem(
        [FourTermEquation(eq.A, phi(eq.A), eq.C, phi(eq.C), eq.F, phi(eq.F), eq.E) for eq in ps]
    )


def check_phi_system(ps: PhiSystem, tol: float | None = None, strict: bool = False) -> ConsistencyReport:
    """Rank conditions of the structured system.

    By default only the listed families are evaluated.  ``strict=True``
    evaluates every family of the general system and logs a warning when
    the extra families change the verdict.
    """
    report = check_system(to_general_system(ps), tol)
    listed = report.select(LISTED_FAMILIES)
    if not strict:
        return listed
    if listed.consistent != report.consistent:
        log.warning("strict phi check disagrees with the listed families: %s",
                    ", ".join(c.label() for c in report.failures))
    return report


def strict_disagreement(ps: PhiSystem, tol: float | None = None) -> tuple[bool, bool]:
    """Verdicts of the listed families and of all families."""
    report = check_system(to_general_system(ps), tol)
    return report.select(LISTED_FAMILIES).consistent, report.consistent


def phi_residuals(ps: PhiSystem, X: Sequence[QuatMatrix], Z: Sequence[QuatMatrix]) -> list[float]:
    if len(X) != ps.k or len(Z) != ps.k + 1:
        raise ShapeError(f"need {ps.k} X's and {ps.k + 1} Z's, got {len(X)} and {len(Z)}")
    phi = lambda m: phi_transpose(ps.inv, m)  # noqa: E731
    out = []
    for i, eq in enumerate(ps):
        want = {"X": (eq.A.cols, eq.p), "Z": (eq.C.cols, eq.C.cols), "Z'": (eq.F.cols, eq.F.cols)}
        for name, got in (("X", X[i]), ("Z", Z[i]), ("Z'", Z[i + 1])):
            if got.shape != want[name]:
                raise ShapeError(f"equation {i + 1}: {name} is {got.shape}, expected {want[name]}")
        ax = eq.A @ X[i]
        lhs = ax + phi(ax) + eq.C @ Z[i] @ phi(eq.C) + eq.F @ Z[i + 1] @ phi(eq.F)
        out.append((lhs - eq.E).norm())
    return out


def solve_phi_system(ps: PhiSystem, seed: int | None = None, tol_res: float = TOL_RES,
                     tol_rank: float | None = None) -> PhiSolution:
    """Solve the general image and symmetrize.

    ``X_i = (Xh_i + (Yh_i)_phi) / 2`` and ``Z_i = (Zh_i + (Zh_i)_phi) / 2``.
    Raises :class:`~quatsylv.errors.InconsistentSystem` like
    :func:`~quatsylv.sylvester.solve_system`.
    """
    sol = solve_system(to_general_system(ps), seed=seed, tol_res=tol_res, tol_rank=tol_rank)
    phi = lambda m: phi_transpose(ps.inv, m)  # noqa: E731
    X = tuple((x + phi(y)) / 2.0 for x, y in zip(sol.X, sol.Y))
    Z = tuple((z + phi(z)) / 2.0 for z in sol.Z)
    res = phi_residuals(ps, X, Z)
    defects = tuple((z - phi(z)).norm() for z in Z)
    bound = max(1e-8 * (1.0 + eq.E.norm()) for eq in ps)
    if max(res) > bound:
        log.warning("phi solution verification exceeded tolerance: residuals=%s", res)
    return PhiSolution(X, Z, tuple(res), defects)


def random_phi_hermitian(inv: Involution, n: int, rng: np.random.Generator) -> QuatMatrix:
    w = QuatMatrix.random(n, n, rng)
    return w + phi_transpose(inv, w)

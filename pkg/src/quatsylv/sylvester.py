"""Coupled four-term Sylvester equations over the quaternions.

The system handled here is

    A_i X_i + Y_i B_i + C_i Z_i D_i + F_i Z_{i+1} G_i = E_i,    i = 1..k

where consecutive equations share ``Z_{i+1}``.  Three layers are provided:

* the single-equation machinery (auxiliary matrices, the four projector
  conditions and the closed-form general solution),
* the rank conditions on block matrices built from the raw coefficients,
  one family per choice of how the window end unknowns are absorbed,
* a constructive solver that equates the two parametrised expressions of
  each shared ``Z`` and recurses on the resulting smaller system whose
  unknowns are the free parameters.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple, Sequence

import numpy as np

from .errors import BadWindow, FormatError, InconsistentEquation, InconsistentSystem, ShapeError
from .quat_linalg import Decomposition, RankResult, complex_adjoint, decompose, default_tol, rank
from .quat_matrix import QuatMatrix, Signed, assemble_block, hstack, split_block, vstack, zeros

log = logging.getLogger(__name__)

__all__ = [
    "FourTermEquation",
    "SylvesterSystem",
    "Lemma1Aux",
    "FreeParams",
    "Family",
    "RankCondition",
    "ConsistencyReport",
    "SystemSolution",
    "SplitInfo",
    "lemma1_aux",
    "lemma1_consistent",
    "lemma1_solve",
    "build_condition",
    "evaluate_condition",
    "check_system",
    "reduce_system",
    "solve_system",
    "residuals",
    "TOL_RES",
    "SOLVER_FLOOR",
    "system_auxes",
]

TOL_RES = 1e-10
# cutoff (relative to the coefficient scale of the whole system) below
# which singular values inside the solver are treated as zero; products such
# as R_A C are exactly rank deficient in theory but carry rounding noise
SOLVER_FLOOR = 1e-11

COEFFS = ("A", "B", "C", "D", "F", "G", "E")


# ---------------------------------------------------------------------------
# data model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FourTermEquation:
    """``A X + Y B + C Z D + F Z' G = E`` with ``E`` of size ``p x q``.

    Unknown shapes follow from the coefficients: ``X`` is ``a x q``, ``Y`` is
    ``p x b``, ``Z`` is ``c x d`` and ``Z'`` is ``f x g``.
    """

    A: QuatMatrix
    B: QuatMatrix
    C: QuatMatrix
    D: QuatMatrix
    F: QuatMatrix
    G: QuatMatrix
    E: QuatMatrix

    def __post_init__(self):
        p, q = self.E.shape
        for name in ("A", "C", "F"):
            if getattr(self, name).rows != p:
                raise ShapeError(f"{name} has {getattr(self, name).rows} rows, E has {p}")
        for name in ("B", "D", "G"):
            if getattr(self, name).cols != q:
                raise ShapeError(f"{name} has {getattr(self, name).cols} columns, E has {q}")

    @property
    def p(self) -> int:
        return self.E.rows

    @property
    def q(self) -> int:
        return self.E.cols

    @property
    def x_shape(self) -> tuple[int, int]:
        return self.A.cols, self.q

    @property
    def y_shape(self) -> tuple[int, int]:
        return self.p, self.B.rows

    @property
    def z_shape(self) -> tuple[int, int]:
        return self.C.cols, self.D.rows

    @property
    def z_next_shape(self) -> tuple[int, int]:
        return self.F.cols, self.G.rows

    def apply(self, X, Y, Z, Zn) -> QuatMatrix:
        """Left-hand side evaluated at the given unknowns."""
        return self.A @ X + Y @ self.B + self.C @ Z @ self.D + self.F @ Zn @ self.G

    def scale(self) -> float:
        """Largest Frobenius norm among the coefficients ``A`` to ``G``."""
        return max(getattr(self, n).norm() for n in COEFFS[:-1])

    def with_rhs(self, E: QuatMatrix) -> FourTermEquation:
        return FourTermEquation(self.A, self.B, self.C, self.D, self.F, self.G, E)

    def to_json(self) -> dict:
        return {name: getattr(self, name).to_json() for name in COEFFS}

    @classmethod
    def from_json(cls, obj, field: str = "") -> FourTermEquation:
        if not isinstance(obj, dict):
            raise FormatError("equation must be an object", field)
        mats = {}
        for name in COEFFS:
            where = f"{field}.{name}" if field else name
            if name not in obj:
                raise FormatError("missing matrix", where)
            mats[name] = QuatMatrix.from_json(obj[name], where)
        try:
            return cls(**mats)
        except ShapeError as exc:
            raise FormatError(str(exc), field) from None


@dataclass(frozen=True)
class SylvesterSystem:
    equations: tuple[FourTermEquation, ...]

    def __init__(self, equations: Sequence[FourTermEquation]):
        eqs = tuple(equations)
        if not eqs:
            raise ShapeError("a system needs at least one equation")
        for i in range(len(eqs) - 1):
            left, right = eqs[i].z_next_shape, eqs[i + 1].z_shape
            if left != right:
                raise ShapeError(
                    f"shared unknown Z_{i + 2}: equation {i + 1} implies {left}, "
                    f"equation {i + 2} implies {right}"
                )
        object.__setattr__(self, "equations", eqs)

    @property
    def k(self) -> int:
        return len(self.equations)

    def __len__(self):
        return self.k

    def __iter__(self):
        return iter(self.equations)

    def __getitem__(self, i) -> FourTermEquation:
        return self.equations[i]

    @property
    def z_shapes(self) -> list[tuple[int, int]]:
        return [self.equations[0].z_shape] + [eq.z_next_shape for eq in self.equations]

    def scale(self) -> float:
        return max(eq.scale() for eq in self.equations)

    def with_rhs(self, index: int, E: QuatMatrix) -> SylvesterSystem:
        eqs = list(self.equations)
        eqs[index] = eqs[index].with_rhs(E)
        return SylvesterSystem(eqs)

    def to_json(self) -> dict:
        return {"k": self.k, "equations": [eq.to_json() for eq in self.equations]}

    @classmethod
    def from_json(cls, obj) -> SylvesterSystem:
        if not isinstance(obj, dict):
            raise FormatError("system must be an object")
        k = obj.get("k")
        if isinstance(k, bool) or not isinstance(k, int):
            raise FormatError("must be an integer", "k")
        if k < 1:
            raise FormatError("must be at least 1", "k")
        eqs = obj.get("equations")
        if not isinstance(eqs, list) or len(eqs) != k:
            raise FormatError(f"expected a list of {k} equations", "equations")
        parsed = [FourTermEquation.from_json(e, f"equations[{i}]") for i, e in enumerate(eqs)]
        try:
            return cls(parsed)
        except ShapeError as exc:
            raise FormatError(str(exc), "equations") from None

    @classmethod
    def zero(cls, k: int, p: int = 2, q: int = 2, a: int = 2, b: int = 2,
             c: int = 2, d: int = 2) -> SylvesterSystem:
        """All-zero system with uniform dimensions (``f = c``, ``g = d``)."""
        eq = FourTermEquation(zeros(p, a), zeros(b, q), zeros(p, c), zeros(d, q),
                              zeros(p, c), zeros(d, q), zeros(p, q))
        return cls([eq] * k)


# ---------------------------------------------------------------------------
# single equation
# ---------------------------------------------------------------------------

class Lemma1Aux:
    """Auxiliary matrices of one equation plus cached decompositions.

    ``A11 = R_A C``, ``B11 = D L_B``, ``C11 = R_A F``, ``D11 = G L_B``,
    ``E11 = R_A E L_B``, ``M11 = R_{A11} C11``, ``N11 = D11 L_{B11}`` and
    ``S11 = C11 L_{M11}``.  Decompositions use the threshold
    ``max(default, floor)`` so that products which vanish in exact
    arithmetic are not mistaken for full-rank noise.
    """

    NAMES = ("A11", "B11", "C11", "D11", "E11", "M11", "N11", "S11")

    def __init__(self, eq: FourTermEquation, floor: float | None = None):
        self.eq = eq
        self.floor = SOLVER_FLOOR * eq.scale() if floor is None else float(floor)
        self._dec: dict[str, Decomposition] = {}
        self._mats: dict[str, QuatMatrix] = {n: getattr(eq, n) for n in COEFFS}
        R, L = self.R, self.L
        m = self._mats
        m["A11"] = R("A") @ eq.C
        m["B11"] = eq.D @ L("B")
        m["C11"] = R("A") @ eq.F
        m["D11"] = eq.G @ L("B")
        m["E11"] = R("A") @ eq.E @ L("B")
        m["M11"] = R("A11") @ m["C11"]
        m["N11"] = m["D11"] @ L("B11")
        m["S11"] = m["C11"] @ L("M11")

    def __getattr__(self, name):
        mats = self.__dict__.get("_mats", {})
        if name in mats:
            return mats[name]
        raise AttributeError(name)

    def _decomposition(self, name: str) -> Decomposition:
        if name not in self._dec:
            a = self._mats[name]
            d = decompose(a)
            if d.tol < self.floor:
                d = decompose(a, self.floor)
            self._dec[name] = d
        return self._dec[name]

    def pinv(self, name: str) -> QuatMatrix:
        key = ("pinv", name)
        if key not in self._dec:
            self._dec[key] = self._decomposition(name).pinv()
        return self._dec[key]

    def _proj(self, name: str):
        key = ("proj", name)
        if key not in self._dec:
            self._dec[key] = self._decomposition(name).projectors()
        return self._dec[key]

    def L(self, name: str) -> QuatMatrix:
        return self._proj(name).L

    def R(self, name: str) -> QuatMatrix:
        return self._proj(name).R

    def rank(self, name: str) -> int:
        return self._decomposition(name).rank

    # particular solutions for the two Z unknowns (free parameters zero)
    def z_first_particular(self) -> QuatMatrix:
        Ap, Bp = self.pinv("A11"), self.pinv("B11")
        E11, C11, D11, S11 = self.E11, self.C11, self.D11, self.S11
        return (
            Ap @ E11 @ Bp
            - Ap @ C11 @ self.pinv("M11") @ E11 @ Bp
            - Ap @ S11 @ self.pinv("C11") @ E11 @ self.pinv("N11") @ D11 @ Bp
        )

    def z_second_particular(self) -> QuatMatrix:
        E11 = self.E11
        return (
            self.pinv("M11") @ E11 @ self.pinv("D11")
            + self.pinv("S11") @ self.S11 @ self.pinv("C11") @ E11 @ self.pinv("N11")
        )

    def z_first(self, T2, T4, T5) -> QuatMatrix:
        """General ``Z`` of the equation for given free parameters."""
        return (
            self.z_first_particular()
            - self.pinv("A11") @ self.S11 @ T2 @ self.R("N11") @ self.D11 @ self.pinv("B11")
            + self.L("A11") @ T4
            + T5 @ self.R("B11")
        )

    def z_second(self, T1, T2, T3) -> QuatMatrix:
        """General ``Z'`` of the equation for given free parameters."""
        return (
            self.z_second_particular()
            + self.L("M11") @ self.L("S11") @ T1
            + self.L("M11") @ T2 @ self.R("N11")
            + T3 @ self.R("D11")
        )

    def x_and_y(self, Z, Zn, T6, T7, T8) -> tuple[QuatMatrix, QuatMatrix]:
        eq = self.eq
        rest = eq.E - eq.C @ Z @ eq.D - eq.F @ Zn @ eq.G
        X = self.pinv("A") @ rest - T7 @ eq.B + self.L("A") @ T6
        Y = self.R("A") @ rest @ self.pinv("B") + eq.A @ T7 + T8 @ self.R("B")
        return X, Y


def lemma1_aux(eq: FourTermEquation, floor: float | None = None) -> Lemma1Aux:
    return Lemma1Aux(eq, floor)


class Lemma1Verdict(NamedTuple):
    consistent: bool
    residuals: tuple[float, float, float, float]
    threshold: float


def lemma1_consistent(aux: Lemma1Aux, tol_res: float = TOL_RES) -> Lemma1Verdict:
    """Projector test for solvability of one equation.

    The four quantities ``R_M R_{A11} E11``, ``E11 L_{B11} L_N``,
    ``R_{A11} E11 L_{D11}`` and ``R_{C11} E11 L_{B11}`` must vanish; each
    Frobenius norm is compared against ``tol_res * (1 + ||E11||)``.
    """
    E11 = aux.E11
    res = (
        (aux.R("M11") @ aux.R("A11") @ E11).norm(),
        (E11 @ aux.L("B11") @ aux.L("N11")).norm(),
        (aux.R("A11") @ E11 @ aux.L("D11")).norm(),
        (aux.R("C11") @ E11 @ aux.L("B11")).norm(),
    )
    threshold = tol_res * (1.0 + E11.norm())
    return Lemma1Verdict(all(r <= threshold for r in res), res, threshold)


@dataclass(frozen=True)
class FreeParams:
    """Arbitrary matrices ``T1..T8`` of the general solution of one equation.

    Shapes: ``T1, T2, T3`` are ``f x g``; ``T4, T5`` are ``c x d``;
    ``T6`` is ``a x q``; ``T7`` is ``a x b``; ``T8`` is ``p x b``.
    """

    T1: QuatMatrix
    T2: QuatMatrix
    T3: QuatMatrix
    T4: QuatMatrix
    T5: QuatMatrix
    T6: QuatMatrix
    T7: QuatMatrix
    T8: QuatMatrix

    @staticmethod
    def shapes(eq: FourTermEquation) -> dict[str, tuple[int, int]]:
        a, b = eq.A.cols, eq.B.rows
        return {
            "T1": eq.z_next_shape, "T2": eq.z_next_shape, "T3": eq.z_next_shape,
            "T4": eq.z_shape, "T5": eq.z_shape,
            "T6": (a, eq.q), "T7": (a, b), "T8": (eq.p, b),
        }

    @classmethod
    def zeros(cls, eq: FourTermEquation) -> FreeParams:
        return cls(**{k: zeros(*s) for k, s in cls.shapes(eq).items()})

    @classmethod
    def random(cls, eq: FourTermEquation, rng: np.random.Generator) -> FreeParams:
        return cls(**{k: QuatMatrix.random(*s, rng) for k, s in cls.shapes(eq).items()})

    @classmethod
    def draw(cls, eq: FourTermEquation, rng: np.random.Generator | None) -> FreeParams:
        return cls.zeros(eq) if rng is None else cls.random(eq, rng)


def lemma1_solve(eq: FourTermEquation, t: FreeParams | None = None,
                 aux: Lemma1Aux | None = None, tol_res: float = TOL_RES):
    """One solution ``(X, Y, Z, Z')`` of a single equation.

    ``t`` selects the member of the solution family; zeros give the
    particular solution.
    """
    aux = lemma1_aux(eq) if aux is None else aux
    verdict = lemma1_consistent(aux, tol_res)
    if not verdict.consistent:
        raise InconsistentEquation("equation has no solution", residuals=verdict.residuals)
    t = FreeParams.zeros(eq) if t is None else t
    Z = aux.z_first(t.T2, t.T4, t.T5)
    Zn = aux.z_second(t.T1, t.T2, t.T3)
    X, Y = aux.x_and_y(Z, Zn, t.T6, t.T7, t.T8)
    return X, Y, Z, Zn


# ---------------------------------------------------------------------------
# rank conditions
# ---------------------------------------------------------------------------

class Family(str, Enum):
    """Rank-condition families.

    The per-equation families pair ``E`` with the coefficients that touch it
    from the left (column blocks) and from the right (row blocks):

    * ``EQ2a``: ``[A C F]`` against ``B``;  ``EQ2b``: ``A`` against ``[B; D; G]``
    * ``EQ3a``: ``[A C]`` against ``[B; G]``;  ``EQ3b``: ``[A F]`` against ``[B; D]``

    The window families couple equations ``m..n`` through the shared
    unknowns and differ in how the two end unknowns ``Z_m`` and ``Z_{n+1}``
    enter: through ``C_m`` / ``F_n`` as column blocks or through ``D_m`` /
    ``G_n`` as row blocks.

    * ``EQ4``: ``C_m`` column, ``F_n`` column
    * ``EQ5``: ``D_m`` row, ``G_n`` row
    * ``EQ6``: ``C_m`` column, ``G_n`` row
    * ``EQ7``: ``D_m`` row, ``F_n`` column
    """

    EQ2a = "EQ2a"
    EQ2b = "EQ2b"
    EQ3a = "EQ3a"
    EQ3b = "EQ3b"
    EQ4 = "EQ4"
    EQ5 = "EQ5"
    EQ6 = "EQ6"
    EQ7 = "EQ7"

    @property
    def is_window(self) -> bool:
        return self in WINDOW_ENDS


SINGLE = (Family.EQ2a, Family.EQ2b, Family.EQ3a, Family.EQ3b)
# (Z_m as C_m column?, Z_{n+1} as F_n column?)
WINDOW_ENDS = {
    Family.EQ4: (True, True),
    Family.EQ5: (False, False),
    Family.EQ6: (True, False),
    Family.EQ7: (False, True),
}
WINDOW = tuple(WINDOW_ENDS)


def _single_blocks(eq: FourTermEquation, family: Family):
    cols = {
        Family.EQ2a: [eq.A, eq.C, eq.F],
        Family.EQ2b: [eq.A],
        Family.EQ3a: [eq.A, eq.C],
        Family.EQ3b: [eq.A, eq.F],
    }[family]
    rows = {
        Family.EQ2a: [eq.B],
        Family.EQ2b: [eq.B, eq.D, eq.G],
        Family.EQ3a: [eq.B, eq.G],
        Family.EQ3b: [eq.B, eq.D],
    }[family]
    lhs = [[eq.E] + cols] + [[r] + [None] * len(cols) for r in rows]
    return assemble_block(lhs), hstack(cols), vstack(rows)


def _window_blocks(sys: SylvesterSystem, family: Family, m: int, n: int):
    left_col, right_col = WINDOW_ENDS[family]
    eqs = [sys[i - 1] for i in range(m, n + 1)]
    w = len(eqs)

    # column keys: ("Cm",), ("E", l), ("S", l) shared between l and l+1, ("Fn",), ("A", l)
    col_keys = []
    if left_col:
        col_keys.append(("Cm",))
    for l in range(w):
        col_keys.append(("E", l))
        if l < w - 1:
            col_keys.append(("S", l))
    if right_col:
        col_keys.append(("Fn",))
    col_keys += [("A", l) for l in range(w)]

    # row keys: ("Dm",), ("eq", l), ("link", l), ("Gn",), ("B", l)
    row_keys = []
    if not left_col:
        row_keys.append(("Dm",))
    for l in range(w):
        row_keys.append(("eq", l))
        if l < w - 1:
            row_keys.append(("link", l))
    if not right_col:
        row_keys.append(("Gn",))
    row_keys += [("B", l) for l in range(w)]

    def cell(rk, ck):
        kind = rk[0]
        if kind == "eq":
            l = rk[1]
            eq = eqs[l]
            if ck == ("Cm",) and l == 0:
                return eq.C
            if ck == ("E", l):
                return eq.E if l % 2 == 0 else Signed(-1, eq.E)
            if ck == ("S", l - 1):
                return eq.C
            if ck == ("S", l):
                return eq.F
            if ck == ("Fn",) and l == w - 1:
                return eq.F
            if ck == ("A", l):
                return eq.A
            return None
        if kind == "link":
            l = rk[1]
            if ck == ("E", l):
                return eqs[l].G
            if ck == ("E", l + 1):
                return eqs[l + 1].D
            return None
        if kind == "Dm":
            return eqs[0].D if ck == ("E", 0) else None
        if kind == "Gn":
            return eqs[-1].G if ck == ("E", w - 1) else None
        if kind == "B":
            return eqs[rk[1]].B if ck == ("E", rk[1]) else None
        raise AssertionError(rk)

    lhs = assemble_block([[cell(r, c) for c in col_keys] for r in row_keys])
    p_rows = [r for r in row_keys if r[0] == "eq"]
    p_cols = [c for c in col_keys if c[0] != "E"]
    q_rows = [r for r in row_keys if r[0] != "eq"]
    q_rows = ([r for r in q_rows if r[0] != "B"] + [r for r in q_rows if r[0] == "B"])
    q_cols = [c for c in col_keys if c[0] == "E"]
    rhs_a = assemble_block([[cell(r, c) for c in p_cols] for r in p_rows])
    rhs_b = assemble_block([[cell(r, c) for c in q_cols] for r in q_rows])
    return lhs, rhs_a, rhs_b


def build_condition(sys: SylvesterSystem, family: Family | str, window):
    """Block matrices ``(lhs, rhs_a, rhs_b)`` of one rank condition.

    The condition holds when ``r(lhs) == r(rhs_a) + r(rhs_b)``.  ``window``
    is an equation index ``i`` (1-based) for the per-equation families and
    a pair ``(m, n)`` with ``1 <= m <= n <= k`` for the window families.
    Blank positions are zero; ``E_l`` carries the sign ``(-1)**(l - m)``.
    """
    family = Family(family)
    if family in SINGLE:
        if isinstance(window, tuple):
            if len(window) != 2 or window[0] != window[1]:
                raise BadWindow(f"{family.value} takes a single equation index, got {window}")
            window = window[0]
        i = int(window)
        if not 1 <= i <= sys.k:
            raise BadWindow(f"equation index {i} outside 1..{sys.k}")
        return _single_blocks(sys[i - 1], family)
    try:
        m, n = window
    except (TypeError, ValueError):
        raise BadWindow(f"{family.value} takes a window (m, n), got {window!r}") from None
    if not 1 <= m <= n <= sys.k:
        raise BadWindow(f"window ({m}, {n}) violates 1 <= m <= n <= {sys.k}")
    return _window_blocks(sys, family, int(m), int(n))


@dataclass(frozen=True)
class RankCondition:
    family: Family
    m: int
    n: int
    lhs_rank: int
    rhs_rank: int
    margin_lhs: float
    margin_rhs: float

    @property
    def passed(self) -> bool:
        return self.lhs_rank == self.rhs_rank

    @property
    def window(self):
        return self.m if self.family in SINGLE else (self.m, self.n)

    def label(self) -> str:
        if self.family in SINGLE:
            return f"{self.family.value}[i={self.m}]"
        return f"{self.family.value}[m={self.m},n={self.n}]"

    def to_json(self) -> dict:
        return {
            "family": self.family.value,
            "m": self.m,
            "n": self.n,
            "lhs_rank": self.lhs_rank,
            "rhs_rank": self.rhs_rank,
            "margin_lhs": _finite_or_none(self.margin_lhs),
            "margin_rhs": _finite_or_none(self.margin_rhs),
            "pass": self.passed,
        }


def _finite_or_none(x: float):
    return float(x) if np.isfinite(x) else None


@dataclass(frozen=True)
class ConsistencyReport:
    conditions: tuple[RankCondition, ...]

    @property
    def consistent(self) -> bool:
        return all(c.passed for c in self.conditions)

    @property
    def failures(self) -> list[RankCondition]:
        return [c for c in self.conditions if not c.passed]

    def select(self, families) -> ConsistencyReport:
        families = {Family(f) for f in families}
        return ConsistencyReport(tuple(c for c in self.conditions if c.family in families))

    def to_json(self) -> list[dict]:
        return [c.to_json() for c in self.conditions]


def evaluate_condition(sys: SylvesterSystem, family: Family | str, window,
                       tol: float | None = None) -> RankCondition:
    family = Family(family)
    lhs, rhs_a, rhs_b = build_condition(sys, family, window)
    if tol is None:
        # one threshold for the block matrix and its parts, never below the
        # coefficient scale, so that a block of rounding noise is not
        # measured against its own size
        sigma = float(np.linalg.norm(complex_adjoint(lhs), 2)) if lhs.size else 0.0
        tol = default_tol(lhs, max(sigma, sys.scale()))
    rl: RankResult = rank(lhs, tol)
    ra, rb = rank(rhs_a, tol), rank(rhs_b, tol)
    m, n = (window, window) if family in SINGLE and not isinstance(window, tuple) else window
    return RankCondition(
        family=family,
        m=int(m),
        n=int(n),
        lhs_rank=rl.rank,
        rhs_rank=ra.rank + rb.rank,
        margin_lhs=rl.margin,
        margin_rhs=min(ra.margin, rb.margin),
    )


def condition_windows(k: int, families=tuple(Family)):
    """All ``(family, window)`` pairs in report order."""
    families = [Family(f) for f in families]
    out = []
    for fam in families:
        if fam in SINGLE:
            out += [(fam, i) for i in range(1, k + 1)]
        else:
            out += [(fam, (m, n)) for m in range(1, k + 1) for n in range(m, k + 1)]
    return out


def check_system(sys: SylvesterSystem, tol: float | None = None,
                 families=tuple(Family)) -> ConsistencyReport:
    """Evaluate every rank condition; the system is solvable iff all pass.

    ``tol`` overrides the default relative rank threshold with an absolute
    one for every rank computed.
    """
    conds = tuple(evaluate_condition(sys, fam, win, tol) for fam, win in condition_windows(sys.k, families))
    return ConsistencyReport(conds)


# ---------------------------------------------------------------------------
# reduction and constructive solution
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SplitInfo:
    """How the unknowns of the reduced system map back to free parameters.

    Reduced equation ``i`` has ``X^ = [T_{i,1}; T_{i+1,4}]`` (row split
    ``x_split[i]``), ``Y^ = [T_{i,3}, T_{i+1,5}]`` (column split
    ``y_split[i]``), and its shared unknowns are the ``T_{i,2}``.
    """

    x_split: tuple[tuple[int, int], ...]
    y_split: tuple[tuple[int, int], ...]
    auxes: tuple[Lemma1Aux, ...] = field(repr=False, compare=False)


def reduce_system(sys: SylvesterSystem, auxes: Sequence[Lemma1Aux] | None = None,
                  tol_res: float = TOL_RES, level: int = 0):
    """Equate neighbouring expressions for each shared ``Z``.

    Returns ``(reduced, info)``; ``reduced`` is ``None`` for a single
    equation.  Raises :class:`InconsistentEquation` if an individual
    equation is already unsolvable.
    """
    auxes = tuple(system_auxes(sys, level)) if auxes is None else tuple(auxes)
    for i, aux in enumerate(auxes):
        verdict = lemma1_consistent(aux, tol_res)
        if not verdict.consistent:
            raise InconsistentEquation(f"equation {i + 1} has no solution", i + 1, verdict.residuals)
    hatted = []
    x_split, y_split = [], []
    for i in range(sys.k - 1):
        cur, nxt = auxes[i], auxes[i + 1]
        A_hat = hstack([cur.L("M11") @ cur.L("S11"), -nxt.L("A11")])
        B_hat = vstack([cur.R("D11"), -nxt.R("B11")])
        C_hat = cur.L("M11")
        D_hat = cur.R("N11")
        F_hat = nxt.pinv("A11") @ nxt.S11
        G_hat = nxt.R("N11") @ nxt.D11 @ nxt.pinv("B11")
        E_hat = nxt.z_first_particular() - cur.z_second_particular()
        hatted.append(FourTermEquation(A_hat, B_hat, C_hat, D_hat, F_hat, G_hat, E_hat))
        f, g = sys[i].z_next_shape
        x_split.append((f, f))
        y_split.append((g, g))
    info = SplitInfo(tuple(x_split), tuple(y_split), auxes)
    if not hatted:
        return None, info
    return SylvesterSystem(hatted), info


@dataclass(frozen=True)
class SystemSolution:
    X: tuple[QuatMatrix, ...]
    Y: tuple[QuatMatrix, ...]
    Z: tuple[QuatMatrix, ...]
    residuals: tuple[float, ...] = ()
    shared_z_gaps: tuple[float, ...] = ()

    @property
    def k(self) -> int:
        return len(self.X)

    def to_json(self) -> dict:
        return {
            "X": [x.to_json() for x in self.X],
            "Y": [y.to_json() for y in self.Y],
            "Z": [z.to_json() for z in self.Z],
            "residuals": [float(r) for r in self.residuals],
        }

    @classmethod
    def from_json(cls, obj) -> SystemSolution:
        if not isinstance(obj, dict):
            raise FormatError("solution must be an object")
        parts = {}
        for key in ("X", "Y", "Z"):
            val = obj.get(key)
            if not isinstance(val, list):
                raise FormatError("expected a list of matrices", key)
            parts[key] = tuple(QuatMatrix.from_json(m, f"{key}[{i}]") for i, m in enumerate(val))
        if len(parts["X"]) != len(parts["Y"]) or len(parts["Z"]) != len(parts["X"]) + 1:
            raise FormatError("need k X's, k Y's and k+1 Z's", "Z")
        return cls(parts["X"], parts["Y"], parts["Z"])


def residuals(sys: SylvesterSystem, sol: SystemSolution) -> list[float]:
    """Frobenius norm of ``LHS_i - E_i`` for each equation."""
    if sol.k != sys.k or len(sol.Z) != sys.k + 1:
        raise ShapeError(f"solution has {sol.k} equations' unknowns, system has {sys.k}")
    out = []
    for i, eq in enumerate(sys):
        shapes = (eq.x_shape, eq.y_shape, eq.z_shape, eq.z_next_shape)
        given = (sol.X[i], sol.Y[i], sol.Z[i], sol.Z[i + 1])
        for name, want, got in zip(("X", "Y", "Z", "Z"), shapes, given):
            if got.shape != want:
                raise ShapeError(f"equation {i + 1}: {name} is {got.shape}, expected {want}")
        out.append((eq.apply(*given) - eq.E).norm())
    return out


def system_auxes(sys: SylvesterSystem, level: int = 0) -> list[Lemma1Aux]:
    """Auxiliaries of every equation with one floor for the whole system.

    Reduced systems are built from projectors, whose nonzero singular
    values are one, so below the top level the floor is never taken
    below ``SOLVER_FLOOR``.  A reduced equation whose coefficients are
    pure rounding noise then has rank zero everywhere.
    """
    floor = SOLVER_FLOOR * max(sys.scale(), 1.0 if level else 0.0)
    return [lemma1_aux(eq, floor) for eq in sys]


def _solve(sys: SylvesterSystem, rng, tol_res: float, level: int):
    auxes = system_auxes(sys, level)
    for i, aux in enumerate(auxes):
        verdict = lemma1_consistent(aux, tol_res)
        if not verdict.consistent:
            raise InconsistentSystem(
                f"equation {i + 1} at reduction level {level} fails the projector test "
                f"(residuals {', '.join(f'{r:.3g}' for r in verdict.residuals)})",
                level=level,
            )
    k = sys.k
    params = [FreeParams.draw(eq, rng) for eq in sys]
    T = [dict(p.__dict__) for p in params]
    gaps = []
    if k > 1:
        reduced, info = reduce_system(sys, auxes, tol_res, level)
        Xh, Yh, Zh, _ = _solve(reduced, rng, tol_res, level + 1)
        for i in range(k - 1):
            blocks = split_block(Xh[i], info.x_split[i], [Xh[i].cols])
            T[i]["T1"], T[i + 1]["T4"] = blocks[0][0], blocks[1][0]
            blocks = split_block(Yh[i], [Yh[i].rows], info.y_split[i])
            T[i]["T3"], T[i + 1]["T5"] = blocks[0][0], blocks[0][1]
        for i in range(k):
            T[i]["T2"] = Zh[i]
    Z = [auxes[0].z_first(T[0]["T2"], T[0]["T4"], T[0]["T5"])]
    for i in range(k):
        t = T[i]
        Z.append(auxes[i].z_second(t["T1"], t["T2"], t["T3"]))
        if i + 1 < k:
            u = T[i + 1]
            alt = auxes[i + 1].z_first(u["T2"], u["T4"], u["T5"])
            gaps.append((alt - Z[-1]).norm() / (1.0 + Z[-1].norm()))
    X, Y = [], []
    for i in range(k):
        t = T[i]
        x, y = auxes[i].x_and_y(Z[i], Z[i + 1], t["T6"], t["T7"], t["T8"])
        X.append(x)
        Y.append(y)
    return X, Y, Z, gaps


def solve_system(sys: SylvesterSystem, seed: int | None = None,
                 tol_res: float = TOL_RES, tol_rank: float | None = None) -> SystemSolution:
    """Construct one solution by recursive reduction.

    With ``seed=None`` every free parameter is zero; otherwise parameters are
    drawn from a standard normal generator seeded with ``seed``.  Raises
    :class:`InconsistentSystem` carrying the rank-condition report when any
    level of the reduction fails its projector test.

    The returned solution records per-equation residuals and, for each
    shared ``Z``, the relative gap between its two parametrised expressions.
    """
    rng = None if seed is None else np.random.default_rng(seed)
    try:
        X, Y, Z, gaps = _solve(sys, rng, tol_res, 0)
    except InconsistentSystem as exc:
        report = check_system(sys, tol_rank)
        failing = ", ".join(c.label() for c in report.failures) or "none"
        raise InconsistentSystem(f"{exc}; failing rank conditions: {failing}",
                                 report=report, level=exc.level) from None
    sol = SystemSolution(tuple(X), tuple(Y), tuple(Z))
    res = residuals(sys, sol)
    bound = max(1e-8 * (1.0 + eq.E.norm()) for eq in sys)
    if max(res) > bound or any(g > 1e-8 for g in gaps):
        log.warning("solution verification exceeded tolerance: residuals=%s gaps=%s", res, gaps)
    return SystemSolution(tuple(X), tuple(Y), tuple(Z), tuple(res), tuple(gaps))

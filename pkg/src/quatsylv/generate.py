"""Seeded random instances with known solvability.

Planted instances draw the coefficients and the unknowns and compute each
right-hand side from the equation, so they are solvable by construction.
Inconsistent instances perturb one right-hand side of a planted instance
and keep the result only if the real-linear oracle certifies that it has
no solution.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import QuatSylvError, ShapeError
from .quat_matrix import QuatMatrix
from .phi_systems import PhiEquation, PhiSolution, PhiSystem, random_phi_hermitian
from .quat_core import Involution
from .quat_matrix import phi_transpose
from .sylvester import FourTermEquation, SylvesterSystem, SystemSolution

__all__ = [
    "Dims",
    "PhiDims",
    "GenerationFailed",
    "random_dims",
    "planted_system",
    "inconsistent_system",
    "planted_phi_system",
    "inconsistent_phi_system",
]

MAX_ATTEMPTS = 100


class GenerationFailed(QuatSylvError):
    """No oracle-certified inconsistent instance within the attempt budget."""


@dataclass(frozen=True)
class Dims:
    """Per-equation sizes; ``z[i]`` is the shape of ``Z_{i+1}`` (0-based list of k+1)."""

    p: tuple[int, ...]
    q: tuple[int, ...]
    a: tuple[int, ...]
    b: tuple[int, ...]
    z: tuple[tuple[int, int], ...]

    @property
    def k(self) -> int:
        return len(self.p)

    @classmethod
    def uniform(cls, k: int, n: int) -> Dims:
        if k < 1:
            raise ShapeError("k must be at least 1")
        if n < 0:
            raise ShapeError("dimensions must be nonnegative")
        return cls((n,) * k, (n,) * k, (n,) * k, (n,) * k, ((n, n),) * (k + 1))


def random_dims(rng: np.random.Generator, k: int, low: int = 1, high: int = 5) -> Dims:
    draw = lambda: tuple(int(v) for v in rng.integers(low, high + 1, size=k))  # noqa: E731
    z = tuple((int(r), int(c)) for r, c in rng.integers(low, high + 1, size=(k + 1, 2)))
    return Dims(draw(), draw(), draw(), draw(), z)


def _coef(rng, rows, cols, deficient):
    rank = None
    if deficient is not None:
        rank = max(0, min(deficient, rows, cols))
    return QuatMatrix.random(rows, cols, rng, rank=rank)


def planted_system(rng: np.random.Generator, dims: Dims, deficient: int | None = None):
    """Random solvable system and the unknowns it was built from.

    ``deficient`` caps the rank of every coefficient matrix, which keeps
    the projectors ``L_A``, ``R_A`` nontrivial.
    """
    eqs, X, Y = [], [], []
    Z = [QuatMatrix.random(r, c, rng) for r, c in dims.z]
    for i in range(dims.k):
        p, q, a, b = dims.p[i], dims.q[i], dims.a[i], dims.b[i]
        (c, d), (f, g) = dims.z[i], dims.z[i + 1]
        A = _coef(rng, p, a, deficient)
        B = _coef(rng, b, q, deficient)
        C = _coef(rng, p, c, deficient)
        D = _coef(rng, d, q, deficient)
        F = _coef(rng, p, f, deficient)
        G = _coef(rng, g, q, deficient)
        x = QuatMatrix.random(a, q, rng)
        y = QuatMatrix.random(p, b, rng)
        E = A @ x + y @ B + C @ Z[i] @ D + F @ Z[i + 1] @ G
        eqs.append(FourTermEquation(A, B, C, D, F, G, E))
        X.append(x)
        Y.append(y)
    return SylvesterSystem(eqs), SystemSolution(tuple(X), tuple(Y), tuple(Z))


def inconsistent_system(rng: np.random.Generator, dims: Dims, deficient: int | None = None,
                        attempts: int = MAX_ATTEMPTS) -> SylvesterSystem:
    """Planted system with one ``E_i`` perturbed, certified unsolvable."""
    from .oracle import oracle_consistent, realify

    for _ in range(attempts):
        sys, _ = planted_system(rng, dims, deficient)
        i = int(rng.integers(sys.k))
        eq = sys[i]
        bumped = eq.E + QuatMatrix.random(eq.p, eq.q, rng)
        candidate = sys.with_rhs(i, bumped)
        if not oracle_consistent(realify(candidate)):
            return candidate
    raise GenerationFailed(f"no certified inconsistent instance in {attempts} attempts")


@dataclass(frozen=True)
class PhiDims:
    """Sizes of a phi system; ``z[i]`` is the order of the square ``Z_{i+1}``."""

    p: tuple[int, ...]
    a: tuple[int, ...]
    z: tuple[int, ...]

    @property
    def k(self) -> int:
        return len(self.p)

    @classmethod
    def uniform(cls, k: int, n: int) -> PhiDims:
        if k < 1:
            raise ShapeError("k must be at least 1")
        if n < 0:
            raise ShapeError("dimensions must be nonnegative")
        return cls((n,) * k, (n,) * k, (n,) * (k + 1))

    @classmethod
    def random(cls, rng: np.random.Generator, k: int, low: int = 1, high: int = 5) -> PhiDims:
        draw = lambda n: tuple(int(v) for v in rng.integers(low, high + 1, size=n))  # noqa: E731
        return cls(draw(k), draw(k), draw(k + 1))


def planted_phi_system(rng: np.random.Generator, inv: Involution, dims: PhiDims,
                       deficient: int | None = None):
    """Random solvable phi system and the unknowns it was built from.

    The ``Z``'s are drawn phi-Hermitian and each ``E_i`` is symmetrized to
    remove rounding asymmetry.
    """
    phi = lambda m: phi_transpose(inv, m)  # noqa: E731
    Z = [random_phi_hermitian(inv, n, rng) for n in dims.z]
    eqs, X = [], []
    for i in range(dims.k):
        p, a = dims.p[i], dims.a[i]
        A = _coef(rng, p, a, deficient)
        C = _coef(rng, p, dims.z[i], deficient)
        F = _coef(rng, p, dims.z[i + 1], deficient)
        x = QuatMatrix.random(a, p, rng)
        ax = A @ x
        E = ax + phi(ax) + C @ Z[i] @ phi(C) + F @ Z[i + 1] @ phi(F)
        E = (E + phi(E)) / 2.0
        eqs.append(PhiEquation(A, C, F, E))
        X.append(x)
    return PhiSystem(inv, eqs), PhiSolution(tuple(X), tuple(Z))


def inconsistent_phi_system(rng: np.random.Generator, inv: Involution, dims: PhiDims,
                            deficient: int | None = None,
                            attempts: int = MAX_ATTEMPTS) -> PhiSystem:
    """Planted phi system with one ``E_i`` moved by a phi-Hermitian bump."""
    from .oracle import oracle_consistent, realify

    for _ in range(attempts):
        ps, _ = planted_phi_system(rng, inv, dims, deficient)
        i = int(rng.integers(ps.k))
        eq = ps[i]
        bump = random_phi_hermitian(inv, eq.p, rng)
        E = eq.E + bump
        candidate = ps.with_rhs(i, (E + phi_transpose(inv, E)) / 2.0)
        if not oracle_consistent(realify(candidate)):
            return candidate
    raise GenerationFailed(f"no certified inconsistent instance in {attempts} attempts")

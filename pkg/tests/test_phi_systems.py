import json
import logging

import numpy as np
import pytest

from quatsylv.errors import FormatError, InconsistentSystem, NonSquare, ShapeError
from quatsylv.generate import PhiDims, inconsistent_phi_system, planted_phi_system
from quatsylv.oracle import oracle_consistent, realify
from quatsylv.phi_systems import (
    LISTED_FAMILIES,
    PhiEquation,
    PhiSolution,
    PhiSystem,
    check_phi_system,
    phi_hermitian_check,
    phi_residuals,
    random_phi_hermitian,
    solve_phi_system,
    strict_disagreement,
    to_general_system,
)
from quatsylv.quat_core import K, involution_from_axis
from quatsylv.quat_matrix import QuatMatrix, identity, phi_transpose, zeros
from quatsylv.sylvester import Family, check_system

from conftest import rand


def test_hermitian_check(rng, inv):
    ok, defect = phi_hermitian_check(inv, identity(3))
    assert ok and defect == 0
    b = rand(rng, 4, 4)
    assert phi_hermitian_check(inv, b + b.phi(inv))[0]
    with pytest.raises(NonSquare):
        phi_hermitian_check(inv, rand(rng, 2, 3))


def test_hermitian_check_axis_entry():
    inv = involution_from_axis((0, 0, 1))
    ok, defect = phi_hermitian_check(inv, QuatMatrix.from_entries([[K]]))
    assert not ok and defect == pytest.approx(2.0)


def test_system_validation(rng, inv):
    e = random_phi_hermitian(inv, 2, rng)
    eq = PhiEquation(rand(rng, 2, 1), rand(rng, 2, 2), rand(rng, 2, 3), e)
    with pytest.raises(ShapeError, match="Z_2"):
        PhiSystem(inv, [eq, eq])
    with pytest.raises(ShapeError, match="not phi-Hermitian"):
        PhiSystem(inv, [eq.with_rhs(rand(rng, 2, 2))])
    with pytest.raises(NonSquare):
        PhiEquation(rand(rng, 2, 1), rand(rng, 2, 2), rand(rng, 2, 2), rand(rng, 2, 3))


def test_general_image_identity():
    inv = involution_from_axis((1, 2, 3))
    ps = PhiSystem(inv, [PhiEquation(identity(2), identity(2), identity(2), zeros(2, 2))])
    eq = to_general_system(ps)[0]
    for name in "ABCDFG":
        assert getattr(eq, name).allclose(identity(2), atol=1e-15)


def test_general_image_is_phi_transpose(rng, inv):
    ps, _ = planted_phi_system(rng, inv, PhiDims.random(rng, 3, 1, 3))
    gs = to_general_system(ps)
    assert gs.k == 3
    for p, g in zip(ps, gs):
        assert g.B == phi_transpose(inv, p.A)
        assert g.D == phi_transpose(inv, p.C)
        assert g.G == phi_transpose(inv, p.F)
        assert g.E == p.E


def test_zero_system(inv):
    ps = PhiSystem.zero(inv, 2)
    assert check_phi_system(ps).consistent
    sol = solve_phi_system(ps)
    assert all(m.norm() == 0 for m in sol.X + sol.Z)


def test_forced_equation(rng, inv):
    e = random_phi_hermitian(inv, 3, rng)
    ps = PhiSystem(inv, [PhiEquation(zeros(3, 2), identity(3), zeros(3, 2), e)])
    sol = solve_phi_system(ps)
    assert sol.Z[0].allclose(e, atol=1e-12)


def test_planted_solve(rng, inv):
    ps, planted = planted_phi_system(rng, inv, PhiDims.uniform(2, 3), deficient=1)
    assert max(phi_residuals(ps, planted.X, planted.Z)) <= 1e-12 * (1 + max(e.E.norm() for e in ps))
    assert check_phi_system(ps).consistent
    sol = solve_phi_system(ps, seed=3)
    scale = 1 + max(e.E.norm() for e in ps)
    assert max(sol.residuals) <= 1e-8 * scale
    assert max(sol.symmetry_defects) <= 1e-10 * scale
    for z in sol.Z:
        assert phi_hermitian_check(inv, z)[0]


def test_inconsistent(rng, inv):
    dims = PhiDims(p=(4, 4), a=(1, 1), z=(2, 2, 2))
    ps = inconsistent_phi_system(rng, inv, dims, deficient=1)
    assert not oracle_consistent(realify(ps))
    assert not check_phi_system(ps).consistent
    with pytest.raises(InconsistentSystem):
        solve_phi_system(ps)


def test_listed_families_match_general_check(rng, inv):
    for _ in range(10):
        dims = PhiDims(p=(4, 4), a=(1, 2), z=(2, 1, 2))
        if rng.random() < 0.5:
            ps, _ = planted_phi_system(rng, inv, dims, deficient=1)
        else:
            ps = inconsistent_phi_system(rng, inv, dims, deficient=1)
        general = check_system(to_general_system(ps)).select(LISTED_FAMILIES)
        phi = check_phi_system(ps)
        assert [c.to_json() for c in phi.conditions] == [c.to_json() for c in general.conditions]
        listed, full = strict_disagreement(ps)
        assert listed == full == phi.consistent


def test_strict_mode_reports_everything(rng, inv, caplog):
    ps, _ = planted_phi_system(rng, inv, PhiDims.uniform(2, 2))
    strict = check_phi_system(ps, strict=True)
    assert {c.family for c in strict.conditions} == set(Family)
    assert {c.family for c in check_phi_system(ps).conditions} == set(LISTED_FAMILIES)
    with caplog.at_level(logging.WARNING):
        check_phi_system(ps, strict=True)
    assert not caplog.records


def test_json_round_trip(rng):
    inv = involution_from_axis((0.2, -1, 0.5))
    ps, sol = planted_phi_system(rng, inv, PhiDims.uniform(2, 2))
    back = PhiSystem.from_json(json.loads(json.dumps(ps.to_json())))
    assert back.inv == ps.inv and back.k == 2
    assert all(a.E == b.E for a, b in zip(ps, back))
    s2 = PhiSolution.from_json(json.loads(json.dumps(sol.to_json())))
    assert all(a == b for a, b in zip(sol.Z, s2.Z))


@pytest.mark.parametrize("mutate,field", [
    (lambda o: o.update(axis=[0, 0, 0]), "axis"),
    (lambda o: o.update(axis="z"), "axis"),
    (lambda o: o.update(k=3), "equations"),
    (lambda o: o["equations"][0].pop("F"), "equations[0].F"),
    (lambda o: o["equations"][1].update(E=zeros(2, 3).to_json()), "equations[1]"),
])
def test_json_errors(rng, mutate, field):
    ps, _ = planted_phi_system(rng, involution_from_axis((0, 0, 1)), PhiDims.uniform(2, 2))
    obj = ps.to_json()
    mutate(obj)
    with pytest.raises(FormatError) as err:
        PhiSystem.from_json(obj)
    assert err.value.field == field


def test_phi_residual_shapes(rng, inv):
    ps, sol = planted_phi_system(rng, inv, PhiDims.uniform(1, 2))
    with pytest.raises(ShapeError):
        phi_residuals(ps, sol.X, sol.Z[:1])
    with pytest.raises(ShapeError):
        phi_residuals(ps, (zeros(1, 1),), sol.Z)

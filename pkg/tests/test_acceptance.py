"""Acceptance criteria 1-9.

Each test prints one ``criterion N: PASS|FAIL`` line with the measured
worst case next to its pinned tolerance, then asserts.
"""
import json
import time
from pathlib import Path

import numpy as np
import pytest

from quatsylv.errors import InconsistentSystem
from quatsylv.generate import (
    Dims,
    PhiDims,
    inconsistent_phi_system,
    inconsistent_system,
    planted_phi_system,
    planted_system,
    random_dims,
)
from quatsylv.oracle import oracle_consistent, realify
from quatsylv.phi_systems import check_phi_system, phi_hermitian_check, solve_phi_system, to_general_system
from quatsylv.quat_core import involution_from_axis
from quatsylv.quat_linalg import Decomposition, complex_adjoint, marsaglia_styan_check, pinv, projectors, rank
from quatsylv.quat_matrix import QuatMatrix, hstack, vstack
from quatsylv.sylvester import check_system, lemma1_aux, lemma1_consistent, reduce_system, solve_system

# pinned tolerances
PENROSE_TOL = 1e-10
ADJOINT_MUL_TOL = 1e-12
PAIR_GAP_TOL = 1e-10
MS_MARGIN = 1e3
RESIDUAL_TOL = 1e-8
SHARED_Z_TOL = 1e-8
PHI_SYMMETRY_TOL = 1e-10
PHI_PROPERTY_TOL = 1e-10
PLANTED_BUDGET_S = 60.0

GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture
def say(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
    return emit


def rel(r, ref):
    return r / max(ref, 1e-300)


# -- 1 ------------------------------------------------------------------------

def test_criterion_1_penrose(say):
    rng = np.random.default_rng(101)
    worst = 0.0
    for t in range(500):
        m, n = (int(v) for v in rng.integers(1, 9, size=2))
        r = int(rng.integers(0, min(m, n))) if t % 3 == 0 else None
        a = QuatMatrix.random(m, n, rng, rank=r)
        x = pinv(a)
        ax, xa = a @ x, x @ a
        worst = max(worst,
                    rel((ax @ a - a).norm(), a.norm()),
                    rel((x @ ax - x).norm(), x.norm()),
                    rel((ax.H - ax).norm(), ax.norm()),
                    rel((xa.H - xa).norm(), xa.norm()))
    ok = worst <= PENROSE_TOL
    say(1, ok, f"500 matrices, worst relative axiom residual {worst:.2e} (tol {PENROSE_TOL:g})")
    assert ok


# -- 2 ------------------------------------------------------------------------

def test_criterion_2_adjoint(say):
    rng = np.random.default_rng(102)
    worst_mul = worst_gap = 0.0
    for _ in range(200):
        m, l, n = (int(v) for v in rng.integers(1, 7, size=3))
        a = QuatMatrix.random(m, l, rng, rank=int(rng.integers(0, min(m, l) + 1)))
        b = QuatMatrix.random(l, n, rng)
        gap = np.linalg.norm(complex_adjoint(a @ b) - complex_adjoint(a) @ complex_adjoint(b))
        worst_mul = max(worst_mul, gap / (1.0 + a.norm() * b.norm()))
        d = Decomposition(a)
        if d.s.size:
            worst_gap = max(worst_gap, d.pair_gap() / max(d.s[0], 1e-300))
    ok = worst_mul <= ADJOINT_MUL_TOL and worst_gap <= PAIR_GAP_TOL
    say(2, ok, f"200 trials, multiplicativity {worst_mul:.2e} (tol {ADJOINT_MUL_TOL:g}), "
               f"pair gap {worst_gap:.2e} (tol {PAIR_GAP_TOL:g})")
    assert ok


# -- 3 ------------------------------------------------------------------------

def _well_separated(mats):
    return all(rank(x).margin >= MS_MARGIN for x in mats)


def test_criterion_3_marsaglia_styan(say):
    rng = np.random.default_rng(103)
    accepted = drawn = failures = 0
    while accepted < 200:
        drawn += 1
        m, n, q, s = (int(v) for v in rng.integers(1, 6, size=4))
        a = QuatMatrix.random(m, n, rng, rank=int(rng.integers(0, min(m, n) + 1)))
        b = QuatMatrix.random(m, q, rng, rank=int(rng.integers(0, min(m, q) + 1)))
        c = QuatMatrix.random(s, n, rng, rank=int(rng.integers(0, min(s, n) + 1)))
        pa, pb, pc = projectors(a), projectors(b), projectors(c)
        involved = [a, b, c, pa.R @ b, pb.R @ a, c @ pa.L, a @ pc.L, hstack([a, b]), vstack([a, c])]
        if not _well_separated(involved):
            continue
        accepted += 1
        failures += not marsaglia_styan_check(a, b, c).holds
    ok = failures == 0
    say(3, ok, f"200 triples ({drawn - 200} redrawn for margin < {MS_MARGIN:g}x), "
               f"{failures} integer mismatches")
    assert ok


# -- 4 ------------------------------------------------------------------------

def test_criterion_4_lemma_vs_rank(say):
    rng = np.random.default_rng(104)
    dims = Dims(p=(4,), q=(4,), a=(1,), b=(1,), z=((2, 1), (1, 2)))
    agree = total = inconsistent = 0
    for t in range(400):
        if t < 200:
            s, _ = planted_system(rng, dims, deficient=1)
        else:
            s = inconsistent_system(rng, dims, deficient=1)
        lemma = lemma1_consistent(lemma1_aux(s[0])).consistent
        ranks = check_system(s, families=("EQ2a", "EQ2b", "EQ3a", "EQ3b")).consistent
        inconsistent += not lemma
        agree += lemma == ranks
        total += 1
    ok = agree == total and inconsistent == 200
    say(4, ok, f"{agree}/{total} verdicts agree, {inconsistent}/200 perturbed flagged")
    assert ok


# -- 5 and 7 share the planted instances ------------------------------------------

@pytest.fixture(scope="module")
def planted_runs():
    rng = np.random.default_rng(105)
    runs = []
    start = time.perf_counter()
    for k in (1, 2, 3, 4):
        for t in range(50):
            s, _ = planted_system(rng, random_dims(rng, k, 1, 5), deficient=(None, 1, 2)[t % 3])
            report = check_system(s)
            sol = solve_system(s)
            runs.append((s, report, sol, oracle_consistent(realify(s))))
    return runs, time.perf_counter() - start


def test_criterion_5_planted(say, planted_runs):
    runs, elapsed = planted_runs
    checked = all(r.consistent for _, r, _, _ in runs)
    oracle = all(o for *_, o in runs)
    worst_res = max(max(r / (1 + eq.E.norm()) for r, eq in zip(sol.residuals, s)) for s, _, sol, _ in runs)
    worst_gap = max((max(sol.shared_z_gaps, default=0.0) for _, _, sol, _ in runs), default=0.0)
    ok = (checked and oracle and worst_res <= RESIDUAL_TOL and worst_gap <= SHARED_Z_TOL
          and elapsed <= PLANTED_BUDGET_S)
    say(5, ok, f"200 systems, check {checked}, oracle {oracle}, residual {worst_res:.2e} "
               f"(tol {RESIDUAL_TOL:g}), shared-Z gap {worst_gap:.2e} (tol {SHARED_Z_TOL:g}), "
               f"{elapsed:.1f}s (budget {PLANTED_BUDGET_S:g}s)")
    assert ok


# -- 6 ------------------------------------------------------------------------

def test_criterion_6_inconsistent(say):
    rng = np.random.default_rng(106)
    flagged = raised = 0
    for t in range(200):
        k = 1 + t % 3
        d = random_dims(rng, k, 1, 2)
        d = Dims(tuple(v + 2 for v in d.p), tuple(v + 2 for v in d.q), d.a, d.b, d.z)
        s = inconsistent_system(rng, d, deficient=1)
        flagged += bool(check_system(s).failures)
        try:
            solve_system(s)
        except InconsistentSystem:
            raised += 1
    ok = flagged == raised == 200
    say(6, ok, f"200 certified-inconsistent systems, {flagged} flagged by check_system, "
               f"{raised} raised by solve_system")
    assert ok


# -- 7 ------------------------------------------------------------------------

def test_criterion_7_reduction(say, planted_runs):
    runs, _ = planted_runs
    total = passed = 0
    for s, *_ in runs:
        reduced, _ = reduce_system(s)
        if reduced is None:
            continue
        total += 1
        passed += check_system(reduced).consistent
    ok = passed == total
    say(7, ok, f"{passed}/{total} hatted systems pass check_system")
    assert ok


# -- 8 ------------------------------------------------------------------------

def _phi_properties(rng, axes):
    worst = {3: 0.0, 4: 0.0, 6: 0, 8: 0.0, 9: 0.0}
    for t in range(100):
        inv = involution_from_axis(axes[t % len(axes)])
        m, n, p = (int(v) for v in rng.integers(1, 6, size=3))
        a = QuatMatrix.random(m, n, rng, rank=int(rng.integers(0, min(m, n) + 1)))
        b = QuatMatrix.random(n, p, rng)
        phi = lambda x: x.phi(inv)  # noqa: E731
        worst[3] = max(worst[3], rel((phi(a @ b) - phi(b) @ phi(a)).norm(), 1 + (a @ b).norm()))
        worst[4] = max(worst[4], rel((phi(phi(a)) - a).norm(), 1 + a.norm()))
        worst[6] += rank(a).rank != rank(phi(a)).rank
        worst[8] = max(worst[8], rel((pinv(phi(a)) - phi(pinv(a))).norm(), 1 + pinv(a).norm()))
        pa, pf = projectors(a), projectors(phi(a))
        worst[9] = max(worst[9], (phi(pa.L) - pf.R).norm(), (phi(pa.R) - pf.L).norm())
    return worst


def test_criterion_8_phi(say):
    rng = np.random.default_rng(108)
    axes = [(0.0, 0.0, 1.0), (1.0, 2.0, -0.5)]
    worst_res = worst_sym = 0.0
    agree = 0
    for t in range(100):
        inv = involution_from_axis(axes[t % 2])
        k = 1 + t % 3
        ps, _ = planted_phi_system(rng, inv, PhiDims.random(rng, k, 1, 4), deficient=(None, 1, 2)[t % 3])
        scale = 1 + max(eq.E.norm() for eq in ps)
        sol = solve_phi_system(ps)
        worst_res = max(worst_res, max(sol.residuals) / scale)
        worst_sym = max(worst_sym, max(phi_hermitian_check(inv, z)[1] for z in sol.Z) / scale)
        phi_verdict = check_phi_system(ps).consistent
        general = check_system(to_general_system(ps)).consistent
        agree += phi_verdict == general == oracle_consistent(realify(ps)) is True
    # the same agreement on certified-inconsistent instances
    for t in range(30):
        inv = involution_from_axis(axes[t % 2])
        ps = inconsistent_phi_system(rng, inv, PhiDims(p=(4,) * 2, a=(1,) * 2, z=(2,) * 3), deficient=1)
        agree += check_phi_system(ps).consistent == check_system(to_general_system(ps)).consistent is False
    props = _phi_properties(rng, axes)
    props_ok = all(v <= PHI_PROPERTY_TOL for key, v in props.items() if key != 6) and props[6] == 0
    ok = worst_res <= RESIDUAL_TOL and worst_sym <= PHI_SYMMETRY_TOL and agree == 130 and props_ok
    say(8, ok, f"100 planted + 30 inconsistent phi systems, residual {worst_res:.2e} "
               f"(tol {RESIDUAL_TOL:g}), symmetry {worst_sym:.2e} (tol {PHI_SYMMETRY_TOL:g}), "
               f"agreement {agree}/130, properties "
               + ", ".join(f"({k}) {v:.1e}" if k != 6 else f"(6) {v} rank mismatches" for k, v in props.items()))
    assert ok


# -- 9 ------------------------------------------------------------------------

def test_criterion_9_cli(say, tmp_path, capsys):
    from quatsylv.cli import main

    def run(*argv):
        return main([str(a) for a in argv])

    codes = {}
    for rep in ("a", "b"):
        d = tmp_path / rep
        d.mkdir()
        codes[rep] = (
            run("gen", "--k", 2, "--dims", 3, "--seed", 0, "-o", d / "gen.json", "--solution-out", d / "plant.json"),
            run("check", d / "gen.json", "-o", d / "check.json"),
            run("solve", d / "gen.json", "-o", d / "solve.json"),
            run("verify", d / "gen.json", d / "solve.json", "-o", d / "verify.json"),
            run("gen", "--k", 2, "--dims", 3, "--deficient", 1, "--mode", "inconsistent", "--seed", 4,
                "-o", d / "gen_bad.json"),
            run("check", d / "gen_bad.json", "-o", d / "check_bad.json"),
            run("solve", d / "gen_bad.json", "-o", d / "solve_bad.json"),
        )
    names = ["gen", "check", "solve", "verify", "gen_bad", "check_bad", "solve_bad"]
    identical = all((tmp_path / "a" / f"{n}.json").read_bytes() == (tmp_path / "b" / f"{n}.json").read_bytes()
                    for n in names)
    golden_gen = (tmp_path / "a" / "gen.json").read_bytes() == (GOLDEN / "gen.json").read_bytes()
    golden_bad = (tmp_path / "a" / "gen_bad.json").read_bytes() == (GOLDEN / "gen_bad.json").read_bytes()
    ragged = json.loads((tmp_path / "a" / "gen.json").read_text())
    ragged["equations"][0]["E"]["data"][0].pop()
    (tmp_path / "ragged.json").write_text(json.dumps(ragged))
    extra = (run("check", tmp_path / "ragged.json"), run("gen", "--k", 0),
             run("gen", "--k", 1, "--dims", 1, "--mode", "inconsistent", "-o", tmp_path / "never.json"))
    capsys.readouterr()
    ok = (codes["a"] == codes["b"] == (0, 0, 0, 0, 0, 1, 1) and extra == (2, 2, 3)
          and identical and golden_gen and golden_bad)
    say(9, ok, f"exit codes {codes['a']} + {extra}, byte-identical reruns {identical}, "
               f"golden gen {golden_gen and golden_bad}")
    assert ok

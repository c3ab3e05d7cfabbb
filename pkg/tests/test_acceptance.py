"""Acceptance suite at desk scale (m = 3, d = 4, n <= 3).

Each test records one PASS/FAIL line, printed in the terminal summary.
"""

import json
import math
from pathlib import Path

import numpy as np

from conftest import DESK, random_point, random_rational
from oracles import classical_theta, vage_bracket
from wickring.cli import EXIT_FAIL, EXIT_INPUT, EXIT_OK, EXIT_UNSOLVABLE, main
from wickring.interpolation import (
    InterpolationProblem,
    SchurParameter,
    build_theta,
    check_theta_identity,
    classical_solve,
    j_defect_min_eig,
    random_problem,
    solve,
    verify_solution,
)
from wickring.matrix import NotStrictlyPositive, RingMatrix, mat_norm_dual, min_eigenvalue, strict_positive_factor
from wickring.projection import CLASSICAL, project
from wickring.rational import Realization, eval_via_contour, realization_taylor, realization_to_rational
from wickring.ring import (
    apply_entire,
    exp_taylor,
    invert,
    norm_dual,
    sqrt1p_taylor,
    taylor_product,
    vage_constant,
    wick_pow,
)

DATA = Path(__file__).parent / "data"
EPS_PD = 1e-10


def seeded(tag):
    return np.random.default_rng([20111205, tag])


def rel_gap(x, y):
    """Largest coefficient difference relative to the largest coefficient."""
    scale = max(np.abs(x.array).max(), np.abs(y.array).max(), 1e-300)
    return float(np.abs(x.array - y.array).max() / scale)


def test_ac01_ring_axioms(criterion):
    rng = seeded(1)
    worst = 0.0
    unit_ok = True
    for _ in range(200):
        F, G, H = (DESK.random(rng) for _ in range(3))
        worst = max(
            worst,
            rel_gap((F * G) * H, F * (G * H)),
            rel_gap(F * G, G * F),
            rel_gap(F * (G + H), F * G + F * H),
        )
        unit_ok &= F * DESK.one() == F and DESK.one() * F == F
    criterion("AC1", "ring axioms, 200 triples", worst <= 1e-12 and unit_ok, f"max rel err {worst:.2e}")


def test_ac02_vage_inequality(criterion):
    rng = seeded(2)
    A2 = vage_constant(2)
    lo, hi = vage_bracket(2)
    violations = 0
    for _ in range(100):
        F, G = DESK.random(rng), DESK.random(rng)
        if norm_dual(F * G, 4) > A2 * norm_dual(F, 2) * norm_dual(G, 4):
            violations += 1
    gap = abs(A2 - math.sqrt(math.pi / 2))
    ok = violations == 0 and gap <= 1e-9 and lo - 1e-12 <= A2 <= hi + 1e-12
    criterion("AC2", "Vage inequality l=2 k=4, 100 pairs", ok, f"violations {violations}, |A(2)-sqrt(pi/2)| {gap:.1e}")


def test_ac03_power_bound(criterion):
    rng = seeded(3)
    A2 = vage_constant(2)
    violations = 0
    for _ in range(50):
        F = DESK.random(rng)
        for p in (1, 2, 3):
            base = A2 * norm_dual(F, p)
            for n in range(1, 7):
                if norm_dual(wick_pow(F, n), p + 2) > base**n / A2 * (1 + 1e-12):
                    violations += 1
    criterion("AC3", "power bound p=1..3 n=1..6, 50 F", violations == 0, f"violations {violations}")


def test_ac04_inverse_and_functional_calculus(criterion):
    rng = seeded(4)
    one = DESK.one()
    inv_err = 0.0
    for _ in range(100):
        c = rng.uniform(0.5, 1.5) * np.exp(2j * np.pi * rng.random())
        F = DESK.random(rng, 0.5, constant=c)
        inv_err = max(inv_err, float(np.abs((F * invert(F)).array - one.array).max()))
    d = DESK.degree_cap
    pairs = {"exp": exp_taylor(d), "sqrt": sqrt1p_taylor(d)}
    calc_err = 0.0
    recon_err = 0.0
    for _ in range(50):
        r = DESK.random(rng, 0.5, constant=0)
        for f in pairs.values():
            lhs = apply_entire(taylor_product(f, f), r)
            rhs = apply_entire(f, r) * apply_entire(f, r)
            calc_err = max(calc_err, float(np.abs(lhs.array - rhs.array).max()))
        root = apply_entire(pairs["sqrt"], r)
        recon_err = max(recon_err, float(np.abs((root * root).array - (1 + r).array).max()))
    ok = inv_err <= 1e-10 and calc_err <= 1e-10 and recon_err <= 1e-10
    criterion(
        "AC4",
        "inverse and functional calculus",
        ok,
        f"inverse {inv_err:.1e}, (fg)(r) {calc_err:.1e}, sqrt^2 {recon_err:.1e}",
    )


def test_ac05_strict_positivity(criterion):
    rng = seeded(5)
    worst = 0.0
    mismatches = 0
    accepted = rejected = 0
    for _ in range(50):
        M = RingMatrix(DESK, [[DESK.random(rng, 0.5) for _ in range(3)] for _ in range(3)])
        A = (M + M.H) * 0.5 + RingMatrix.identity(DESK, 3) * rng.uniform(-0.5, 1.5)
        expect = min_eigenvalue(A) > EPS_PD
        try:
            G = strict_positive_factor(A, EPS_PD)
        except NotStrictlyPositive:
            rejected += 1
            mismatches += expect
            continue
        accepted += 1
        mismatches += not expect
        worst = max(worst, mat_norm_dual(A - G @ G.H, 0))
    try:
        strict_positive_factor(RingMatrix(DESK, [[DESK.var(1)]]), EPS_PD)
        control = False
    except NotStrictlyPositive:
        control = True
    ok = mismatches == 0 and worst <= 1e-9 and control and accepted > 0 and rejected > 0
    criterion(
        "AC5",
        "strict positivity iff A(0) > 0, 50 matrices",
        ok,
        f"accepted {accepted}, rejected {rejected}, recon {worst:.1e}, [[z1]] rejected {control}",
    )


# Floor on the smallest eigenvalue of P(0) for sampled problems. Theta carries
# P^-1, so its coefficients grow roughly like that eigenvalue to the power -(d+1)
# and double-precision residuals grow with them.
PICK_FLOOR = 1e-3


def _problems(tag, count):
    rng = seeded(tag)
    return rng, [random_problem(rng, 1 + k % 3, DESK, min_pick_eig=PICK_FLOOR) for k in range(count)]


def test_ac06_theta_identity(criterion):
    _, probs = _problems(6, 200)
    worst = max(check_theta_identity(p, build_theta(p), 4) for p in probs)
    criterion("AC6", "(1, -b_i) Theta(a_i) = 0, 200 problems", worst <= 1e-8, f"max residual {worst:.1e}")


def test_ac07_forward_direction(criterion):
    rng, probs = _problems(7, 200)
    worst_res = worst_hom = 0.0
    schur_ok = True
    count = 0
    for p in probs:
        params = [
            0,
            DESK.random(rng, 0.05, constant=0.5),
            DESK.random(rng, 0.05, constant=-0.4j),
            [DESK.random(rng, 0.05, constant=0.2), DESK.random(rng, 0.05, constant=0.5)],
            [DESK.random(rng, 0.05, constant=-0.1 + 0.1j), DESK.random(rng, 0.05, constant=0.3j)],
        ]
        for g in params:
            g = SchurParameter.of(DESK, g)
            sol = solve(p, g)
            rep = verify_solution(p, sol.f, sol.u, sol.v, parameter=g)
            worst_res = max(worst_res, rep.max_residual)
            worst_hom = max(worst_hom, rep.max_homogeneous)
            schur_ok &= rep.schur_pass
            count += 1
    ok = worst_res <= 1e-8 and worst_hom <= 1e-8
    criterion(
        "AC7",
        f"f = T_Theta(g) interpolates, {count} solves",
        ok,
        f"residual {worst_res:.1e}, homogeneous {worst_hom:.1e}, schur {schur_ok}",
    )


def test_ac08_classical_consistency(criterion):
    rng, probs = _problems(8, 10)
    worst = 0.0
    for p in probs:
        g = SchurParameter.of(DESK, [DESK.random(rng, 0.1, constant=0.3), DESK.const(0.1j)])
        f, fc = solve(p, g).f, classical_solve(p, g).f
        pts = 0.95 * np.sqrt(rng.random(40)) * np.exp(2j * np.pi * rng.random(40))
        worst = max(worst, float(np.abs(project(f).eval_projected(pts) - fc.eval_projected(pts)).max()))
    trivial = build_theta(InterpolationProblem([CLASSICAL.zero()], [CLASSICAL.zero()]))
    pts = 0.9 * np.exp(2j * np.pi * np.arange(40) / 40) * np.linspace(0, 1, 40)
    diag_err = max(float(np.abs(trivial.projected_value(x) - np.diag([x, 1])).max()) for x in pts)
    ok = worst <= 1e-9 and diag_err <= 1e-12
    criterion("AC8", "classical consistency, 40 samples", ok, f"gap {worst:.1e}, diag(lambda,1) {diag_err:.1e}")


def test_ac09_j_contractive_projection(criterion):
    rng, probs = _problems(9, 10)
    worst = math.inf
    oracle_gap = 0.0
    for p in probs:
        theta = build_theta(p)
        a0 = [x.constant for x in p.points]
        b0 = [x.constant for x in p.targets]
        pts = 0.9 * np.sqrt(rng.random(40)) * np.exp(2j * np.pi * rng.random(40))
        for x in pts:
            worst = min(worst, j_defect_min_eig(theta, x))
            oracle_gap = max(oracle_gap, float(np.abs(theta.projected_value(x) - classical_theta(a0, b0, x)).max()))
    criterion(
        "AC9",
        "J - Theta J Theta* >= 0 at |lambda| <= 0.9",
        worst >= -1e-10,
        f"min eig {worst:.2e}, numpy oracle gap {oracle_gap:.1e}",
    )


def test_ac10_contour_oracle(criterion):
    rng = seeded(10)
    worst = 0.0
    for _ in range(50):
        F = random_rational(DESK, rng, (1, 1))
        r = random_point(DESK, rng)
        worst = max(worst, float(np.abs(eval_via_contour(F, r, nodes=512).array - F(r).array).max()))
    criterion("AC10", "contour vs substitution, 50 pairs, 512 nodes", worst <= 1e-6, f"max diff {worst:.1e}")


def test_ac11_projection_and_realization(criterion):
    rng = seeded(11)
    worst = 0.0
    for _ in range(100):
        F = random_rational(DESK, rng, (2, 2))
        r = random_point(DESK, rng)
        lhs = project(F(r)).at_origin()
        rhs = project(F)(project(r)).at_origin()
        worst = max(worst, float(np.abs(lhs - rhs).max()))
    taylor_gap = 0.0
    for _ in range(20):
        n = int(rng.integers(1, 4))
        R = Realization(
            RingMatrix(DESK, [[DESK.random(rng, 0.3) for _ in range(n)] for _ in range(n)]),
            RingMatrix(DESK, [[DESK.random(rng)] for _ in range(n)]),
            RingMatrix(DESK, [[DESK.random(rng) for _ in range(n)] for _ in range(2)]),
            RingMatrix(DESK, [[DESK.random(rng)] for _ in range(2)]),
        )
        for a, b in zip(realization_taylor(R, 8), realization_to_rational(R).taylor(8)):
            taylor_gap = max(taylor_gap, float(np.abs(a.array - b.array).max()))
    ok = worst <= 1e-12 and taylor_gap <= 1e-10
    criterion("AC11", "projection commutes; realization series", ok, f"{worst:.1e}, taylor {taylor_gap:.1e}")


def test_ac12_cli_contract(criterion, tmp_path):
    problem = tmp_path / "problem.json"
    codes = {}
    codes["fixture"] = main(["fixture", "--seed", "12", "--n", "3", "-o", str(problem)])
    runs = []
    for k in range(2):
        out = tmp_path / f"run{k}.json"
        codes[f"solve{k}"] = main(["solve", str(problem), "-o", str(out)])
        runs.append(out.read_bytes())
    deterministic = runs[0] == runs[1]

    golden_out = tmp_path / "golden.json"
    main(["solve", str(DATA / "trivial_problem.json"), "-o", str(golden_out)])
    got = json.loads(golden_out.read_text())
    want = json.loads((DATA / "trivial_report.json").read_text())
    golden = got.pop("contour_max_abs_diff") <= 1e-15 and want.pop("contour_max_abs_diff") <= 1e-15 and got == want

    codes["fail"] = main(["solve", str(problem), "--tol", "1e-30", "-o", str(tmp_path / "f.json")])
    bad = tmp_path / "bad.json"
    bad.write_text('{"context": {"m": 1}')
    codes["input"] = main(["solve", str(bad)])
    codes["unsolvable"] = main(["solve", str(DATA / "indefinite_problem.json")])
    expected = {
        "fixture": EXIT_OK,
        "solve0": EXIT_OK,
        "solve1": EXIT_OK,
        "fail": EXIT_FAIL,
        "input": EXIT_INPUT,
        "unsolvable": EXIT_UNSOLVABLE,
    }
    ok = deterministic and golden and codes == expected
    criterion(
        "AC12",
        "CLI determinism and exit codes 0/1/2/3",
        ok,
        f"deterministic {deterministic}, golden {golden}, codes {[codes[k] for k in expected]}",
    )

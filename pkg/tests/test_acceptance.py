"""Acceptance suite: one test per acceptance criterion, pinned tolerances.

Each test prints a single pass/fail line (visible with pytest -s) naming the
criterion it certifies.
"""

import json
import time

import numpy as np

from phaseconj.channel import KrausChannel, apply
from phaseconj.cli import main
from phaseconj.dilation import (
    controlled_unitary,
    matching_unitary,
    mixed_ancilla_check,
    shift_formula_unitary,
    verify_dilation,
)
from phaseconj.linalg import frobenius_distance, kron, random_density_matrix
from phaseconj.nsb import (
    MatchingPermutation,
    canonical,
    decompose_d4,
    family_d4,
    matchings,
    random_nsb,
    validate,
)
from phaseconj.optimal import (
    analytic_fidelity,
    choi_fidelity,
    monte_carlo_fidelity,
    optimal_choi,
    optimal_kraus,
    oracle_max_fidelity,
    phase_estimation_fidelity,
    pointwise_fidelity,
    universal_fidelity,
)
from phaseconj.states import phase_unitary, random_phase_vector

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)


def _report(n: int, desc: str, ok: bool, detail: str = ""):
    print(f"acceptance {n:02d} [{'PASS' if ok else 'FAIL'}] {desc} {detail}".rstrip())
    assert ok, f"criterion {n} failed: {desc} {detail}"


def test_criterion_01_optimal_fidelity_law():
    t0 = time.time()
    worst = 0.0
    for d in range(2, 9):
        for seed in range(100):
            b = random_nsb(d, seed)
            worst = max(worst, abs(choi_fidelity(optimal_choi(b)) - 2 / d))
    elapsed = time.time() - t0
    _report(
        1,
        "fidelity 2/d for 100 random NSB per d=2..8",
        worst <= 1e-12 and elapsed <= 10.0,
        f"(worst deviation {worst:.2e}, {elapsed:.1f}s)",
    )


def test_criterion_02_qubit_exactness():
    rng = np.random.default_rng(1)
    ch = optimal_kraus(canonical(2))
    r = optimal_choi(canonical(2))
    worst_state = 0.0
    for _ in range(100):
        rho = random_density_matrix(2, rng)
        worst_state = max(
            worst_state, np.abs(apply(r, rho) - SIGMA_X @ rho @ SIGMA_X).max()
        )
    worst_fid = 0.0
    for _ in range(100):
        pv = random_phase_vector(2, rng)
        worst_fid = max(worst_fid, abs(pointwise_fidelity(ch, pv) - 1.0))
    _report(
        2,
        "d=2 channel equals sigma_x conjugation, unit fidelity",
        worst_state <= 1e-13 and worst_fid <= 1e-13,
        f"(state dev {worst_state:.2e}, fidelity dev {worst_fid:.2e})",
    )


def test_criterion_03_uniqueness_small_d():
    worst = 0.0
    for d in (2, 3):
        target = canonical(d).entries
        for seed in range(50):
            b = random_nsb(d, seed)
            worst = max(worst, np.abs(b.entries - target).max())
        # a validated matrix perturbed at the 1e-11 scale stays near canonical
        perturbed = target.copy()
        if d == 3:
            perturbed[0, 1] = perturbed[1, 0] = 0.5 + 1e-11
        b = validate(perturbed)
        worst = max(worst, np.abs(b.entries - target).max())
    _report(3, "validated d=2,3 matrices equal the unique point", worst <= 1e-10,
            f"(worst deviation {worst:.2e})")


def test_criterion_04_oracle_rederivation():
    ok = True
    details = []
    for d in range(2, 7):
        t0 = time.time()
        res = oracle_max_fidelity(d, tol=1e-6)
        elapsed = time.time() - t0
        gap = abs(res.value - 2 / d)
        cmax = float(res.singleton_weights.max())
        details.append(f"d={d}: gap {gap:.1e}, max c {cmax:.1e}, {elapsed:.1f}s")
        ok = ok and gap <= 1e-6 and cmax <= 1e-5 and elapsed <= 60.0
    _report(4, "optimizer recovers 2/d with vanishing singleton weights", ok,
            "(" + "; ".join(details) + ")")


def test_criterion_05_covariance_suite():
    rng = np.random.default_rng(5)
    worst_cov = 0.0
    worst_var = 0.0
    for d in range(2, 7):
        b = random_nsb(d, 0)
        r = optimal_choi(b)
        ch = optimal_kraus(b)
        phases = [random_phase_vector(d, rng) for _ in range(50)]
        inputs = [random_density_matrix(d, rng) for _ in range(20)]
        for pv in phases:
            u = phase_unitary(pv)
            for rho in inputs:
                lhs = apply(r, u @ rho @ u.conj().T)
                rhs = u.conj() @ apply(r, rho) @ u.T
                worst_cov = max(worst_cov, frobenius_distance(lhs, rhs))
        fids = [pointwise_fidelity(ch, pv) for pv in phases]
        worst_var = max(worst_var, float(np.var(fids)))
    _report(
        5,
        "covariance identity and flat pointwise fidelity, d=2..6",
        worst_cov <= 1e-11 and worst_var <= 1e-20,
        f"(worst covariance {worst_cov:.2e}, worst variance {worst_var:.2e})",
    )


def test_criterion_06_simplex_roundtrip_d4():
    worst_rt = 0.0
    for p1 in np.linspace(0.0, 1.0, 21):
        for p2 in np.linspace(0.0, 1.0, 21):
            if p1 + p2 > 1.0 + 1e-12:
                continue
            q1, q2, q3 = decompose_d4(family_d4(p1, p2))
            worst_rt = max(
                worst_rt, abs(q1 - p1), abs(q2 - p2), abs(q3 - (1 - p1 - p2))
            )
    worst_sym = 0.0
    for seed in range(100):
        b = random_nsb(4, seed).entries
        worst_sym = max(
            worst_sym,
            abs(b[2, 3] - b[0, 1]),
            abs(b[1, 3] - b[0, 2]),
            abs(b[1, 2] - b[0, 3]),
        )
    _report(
        6,
        "d=4 barycentric round-trip and forced symmetries",
        worst_rt <= 1e-12 and worst_sym <= 1e-10,
        f"(round-trip {worst_rt:.2e}, symmetry {worst_sym:.2e})",
    )


def test_criterion_07_dilation_suite():
    ok = True
    details = []
    for d in (2, 4, 6, 8):
        worst_unit = 0.0
        worst_dist = 0.0
        for seed, m in enumerate(matchings(d)):
            spec = matching_unitary(m)
            assert spec.ancilla_dim == d // 2
            u = spec.unitary
            worst_unit = max(
                worst_unit, float(np.linalg.norm(u.conj().T @ u - np.eye(u.shape[0])))
            )
            rep = verify_dilation(spec, optimal_kraus(m.as_nsb()), n_random=20, seed=seed)
            worst_dist = max(worst_dist, rep.max_distance)
        details.append(f"d={d}: unit {worst_unit:.1e}, dist {worst_dist:.1e}")
        ok = ok and worst_unit <= 1e-10 and worst_dist <= 1e-10

    # d=4 controlled route over the weight grid, plus one coherent control state
    cu = controlled_unitary(4)
    worst_ctrl = 0.0
    for p1 in np.linspace(0.0, 1.0, 5):
        for p2 in np.linspace(0.0, 1.0, 5):
            if p1 + p2 > 1.0 + 1e-12:
                continue
            spec = cu.dilation(np.diag([p1, p2, 1 - p1 - p2]))
            target = optimal_kraus(family_d4(p1, p2))
            rep = verify_dilation(spec, target, n_random=20, seed=3, tol=1e-11)
            worst_ctrl = max(worst_ctrl, rep.max_distance)
    v = np.ones(3, dtype=complex) / np.sqrt(3)
    spec = cu.dilation(np.outer(v, v.conj()))
    rep = verify_dilation(spec, optimal_kraus(canonical(4)), n_random=20, seed=4, tol=1e-11)
    worst_ctrl = max(worst_ctrl, rep.max_distance)
    ok = ok and worst_ctrl <= 1e-11
    details.append(f"control {worst_ctrl:.1e}")

    m = MatchingPermutation(4, ((0, 1), (2, 3)))
    mixed_ok = all(
        mixed_ancilla_check(m, a, bta) for a, bta in [(1.0, 0.0), (0.5, 0.5), (0.0, 1.0)]
    )
    ok = ok and mixed_ok
    _report(7, "minimal dilations for every matching, controlled route at d=4", ok,
            "(" + "; ".join(details) + f"; mixed ancilla {mixed_ok})")


def test_criterion_08_comparison_table(tmp_path, capsys):
    out = tmp_path / "table.csv"
    code = main(["table", "--dmax", "64", "--out", str(out)])
    capsys.readouterr()
    rows = out.read_text().strip().splitlines()[1:]
    cells = [row.split(",") for row in rows]
    d2, d3 = cells[0], cells[1]
    exact = (
        float(d2[1]) == 1.0
        and float(d2[2]) == 2 / 3
        and float(d2[3]) == 3 / 4
        and float(d3[1]) == 2 / 3
        and float(d3[2]) == 1 / 2
        and float(d3[3]) == 5 / 9
    )
    # rendered with enough digits to pin the rationals to >= 12 places
    digits = all(
        len(cell.split(".")[-1]) >= 12 or float(cell) in (1.0, 0.5, 0.75)
        for row in (d2, d3)
        for cell in row[1:]
    )
    ordered = True
    for row in cells:
        d, opt, univ, est = int(row[0]), float(row[1]), float(row[2]), float(row[3])
        ordered = ordered and opt > univ and opt > est
        ordered = ordered and opt == analytic_fidelity(d)
        ordered = ordered and univ == universal_fidelity(d)
        ordered = ordered and est == phase_estimation_fidelity(d)
    _report(8, "comparison table rows exact and strictly ordered to d=64",
            code == 0 and exact and digits and ordered)


def test_criterion_09_monte_carlo_consistency():
    ch3 = optimal_kraus(canonical(3))
    mean3, _ = monte_carlo_fidelity(ch3, 10_000, seed=12345)
    flat_ok = abs(mean3 - 2 / 3) <= 1e-9

    ident = KrausChannel(2, (np.eye(2),))
    mean2, stderr2 = monte_carlo_fidelity(ident, 10_000, seed=12345)
    ident_ok = abs(mean2 - 0.5) <= 3 * stderr2
    _report(
        9,
        "Monte Carlo agrees with 2/3 (optimal d=3) and 1/2 (identity d=2)",
        flat_ok and ident_ok,
        f"(|mean-2/3|={abs(mean3 - 2 / 3):.2e}, |mean-1/2|={abs(mean2 - 0.5):.2e}, "
        f"3*stderr={3 * stderr2:.2e})",
    )


def test_criterion_10_formula_diagnostic(capsys):
    code = main(["formula-check", "--d", "4"])
    rep = json.loads(capsys.readouterr().out)
    shifts_ok = (
        code == 0
        and rep["parameters"]["unitary_shifts"] == [1, 3]
        and rep["parameters"]["nonunitary_shifts"] == [2]
    )
    # the circulant construction reproduces the first closed-form block matrix
    m = MatchingPermutation(4, ((0, 1), (2, 3)))
    t10 = np.zeros((4, 4), dtype=complex)
    t10[1, 0] = t10[0, 1] = 1.0
    t32 = np.zeros((4, 4), dtype=complex)
    t32[3, 2] = t32[2, 3] = 1.0
    e = lambda i, j: np.eye(2, dtype=complex)[:, [j]] @ np.eye(2, dtype=complex)[[i], :]
    u1 = kron(t10, e(0, 0)) + kron(t32, e(0, 1)) + kron(t32, e(1, 0)) + kron(t10, e(1, 1))
    circulant_ok = np.array_equal(matching_unitary(m).unitary, u1)
    shift_ok = np.array_equal(shift_formula_unitary(4, 1).matrix, u1)
    _report(
        10,
        "shift diagnostic: k=1,3 unitary, k=2 not; circulant matches level-1 block form",
        shifts_ok and circulant_ok and shift_ok,
    )

"""Acceptance criteria, one test each, at the stated tolerances."""

import json
import math
import os
import time

import numpy as np
import pytest

from qcontrast.certify import (
    certify_record,
    cglmp_dimension_bound,
    cglmp_noisy,
    cglmp_quantum_value,
    fidelity_all_mub_from_contrast,
    fidelity_exact_from_data,
    k_max_all_mub,
    optimal_operating_point,
    required_contrast_all_mub,
    required_contrast_two_mub,
    steering_functional,
    steering_test_from_data,
    steering_threshold,
)
from qcontrast.cli import format_table1, main, table1_rows, validate_mc_rows
from qcontrast.coincidence import synthesize_record
from qcontrast.mubs import all_mubs, mub_projector_sum_check, two_mubs
from qcontrast.noise_model import (
    contrast_from_weight,
    isotropic_weight,
    max_contrast,
    optimal_pair_rate,
    quantum_contrast,
)
from qcontrast.states import flat_spectrum, gaussian_spectrum

from test_cglmp import chsh_oracle

PRIMES_3_31 = [3, 5, 7, 11, 13, 17, 19, 23, 29, 31]


def test_criterion_1_table1_reproduction():
    start = time.perf_counter()
    rows = table1_rows()
    text = format_table1(rows)
    elapsed = time.perf_counter() - start
    assert [(r["d"], r["Q_exp"]) for r in rows] == [(3, 71), (5, 70), (7, 68), (11, 81)]
    allowed_f = [{"94.5"}, {"89.2"}, {"83.8", "83.9"}, {"78.0", "78.1"}]
    for r, allowed in zip(rows, allowed_f):
        assert r["F_pred_percent"] in allowed
    assert [r["k_pred"] for r in rows] == [3, 5, 6, 9]
    assert [(r["d_opt"], r["Q_opt_printed"]) for r in rows] == [
        (4, "9.0"), (9, "20.8"), (14, "32.5"), (23, "55.8")]
    assert "94.5%" in text
    assert elapsed < 1.0


def test_criterion_2_isotropic_thresholds():
    assert abs(isotropic_weight(2, 2) - 1 / 3) < 1e-12
    assert abs(isotropic_weight(10, 6) - 1 / 3) < 1e-12
    for p in (0.1, 1 / 3, 0.5):
        for d in range(2, 51):
            q = contrast_from_weight(d, p)
            assert q == pytest.approx(1 + p * d / (1 - p), rel=1e-12)
            assert abs(isotropic_weight(d, q) - p) < 1e-12


def test_criterion_3_contrast_optimum():
    assert max_contrast(1e-7, 0.8) == pytest.approx(2.0e6, rel=1e-3)
    rng = np.random.default_rng(20240601)
    grid = np.geomspace(1e-10, 10.0, 4001)
    step = math.log(grid[1] / grid[0])
    checked = 0
    while checked < 20:
        n = 10 ** rng.uniform(-7, -2)
        eta = rng.uniform(0.05, 1.0)
        if eta <= 2 * n:
            continue
        qs = [quantum_contrast(mu, n, eta) for mu in grid]
        best = grid[int(np.argmax(qs))]
        assert abs(math.log(best / optimal_pair_rate(n, eta))) <= step
        checked += 1


def test_criterion_4_two_mub_anchor_points():
    start = time.perf_counter()
    q = required_contrast_two_mub(1000, 1000)
    opt = optimal_operating_point(1000)
    elapsed = time.perf_counter() - start
    assert q == pytest.approx(1_997_001, abs=1e-6)
    assert q / opt.q_opt == pytest.approx(343, rel=0.02)
    assert elapsed < 1.0


def test_criterion_5_all_mub_limits():
    for d in (3, 5, 7, 11):
        assert abs(required_contrast_all_mub(d, d) - (d * d - d)) <= 1
    got = {q: k_max_all_mub(q, 10 ** 6) for q in (2.5, 7, 19.99)}
    assert got == {q: math.floor(q) for q in got}


def test_criterion_6_projector_identity_and_exact_fidelity():
    for d in (2, 3, 5, 7, 11):
        assert mub_projector_sum_check(all_mubs(d)) < 1e-10
    for d in (2, 3, 5, 7):
        for q in (2.0, 10.0, 70.0):
            rec = synthesize_record(flat_spectrum(d), all_mubs(d), target_q=q)
            assert abs(fidelity_exact_from_data(rec) - fidelity_all_mub_from_contrast(q, d)) < 1e-9
    start = time.perf_counter()
    mubs = all_mubs(11)
    assert mub_projector_sum_check(mubs) < 1e-10
    for q in (2.0, 10.0, 70.0):
        rec = synthesize_record(flat_spectrum(11), mubs, target_q=q)
        assert abs(fidelity_exact_from_data(rec) - fidelity_all_mub_from_contrast(q, 11)) < 1e-9
    assert time.perf_counter() - start < 30


def test_criterion_7_monte_carlo_oracle():
    levels = (1e-3, 3e-3, 1e-2)
    grid = [(v, v, eta) for v in levels for eta in (0.3, 0.5, 0.8)]
    start = time.perf_counter()
    rows = validate_mc_rows(grid, 10 ** 7, seed=7, detector="threshold",
                            workers=min(len(grid), os.cpu_count() or 1))
    elapsed = time.perf_counter() - start
    bad = [(r["mu"], r["eta"], round(r["z_same"], 2), round(r["z_cross"], 2),
            round(r["z_ratio"], 2)) for r in rows
           if max(abs(r["z_same"]), abs(r["z_cross"]), abs(r["z_ratio"])) >= 5]
    assert elapsed < 120
    assert bad == []


def test_criterion_8_finite_bandwidth():
    ks = {}
    for d in PRIMES_3_31:
        rec = synthesize_record(gaussian_spectrum(d, 2), all_mubs(d), target_q=50.0)
        ks[d] = certify_record(rec).certified_k
    for d in (3, 5, 7):
        for q in np.linspace(5, 40, 36):
            rec = synthesize_record(gaussian_spectrum(d, 100000), all_mubs(d), target_q=q)
            rep = certify_record(rec)
            assert abs(rep.certified_k - k_max_all_mub(rep.average_q, d)) <= 1
    assert ks[31] - ks[23] <= 1
    seq = [ks[d] for d in PRIMES_3_31]
    assert all(b >= a for a, b in zip(seq, seq[1:])), f"k over d={PRIMES_3_31}: {seq}"


def test_criterion_9_steering():
    assert steering_functional(8, 2) > 0 > steering_functional(9, 2)
    ds = np.array([2, 3, 5, 7, 11, 13])
    qs = np.array([steering_threshold(int(d)) for d in ds])
    slope, intercept = np.polyfit(ds, qs, 1)
    resid = qs - (slope * ds + intercept)
    r2 = 1 - np.sum(resid ** 2) / np.sum((qs - qs.mean()) ** 2)
    assert r2 > 0.99
    compared = 0
    for d in (2, 3, 5, 7):
        for i, q in enumerate(np.geomspace(2, 80, 15)):
            margin_q = -2 * steering_functional(q, d)
            if abs(margin_q) <= 0.05:
                continue
            for events in (None, 10 ** 6):
                rec = synthesize_record(flat_spectrum(d), two_mubs(d), target_q=q,
                                        total_events=events, seed=1000 * d + i)
                verdict = steering_test_from_data(rec.matrix_for(0), rec.matrix_for(1), d)
                assert verdict.violated == (margin_q > 0)
                compared += 1
    assert compared > 50


def test_criterion_10_cglmp():
    assert abs(cglmp_quantum_value(2) - chsh_oracle()) < 1e-6
    for d in (50, 64, 100):
        assert 2.9 < cglmp_quantum_value(d) < 3.0
    assert abs(cglmp_noisy(21, 10) - 2) < 0.05
    off = {q: (cglmp_dimension_bound(q).d_max, (q - 1) // 2) for q in range(10, 201)
           if abs(cglmp_dimension_bound(q).d_max - (q - 1) // 2) > 2}
    assert off == {}, f"{len(off)} values of q disagree, first {min(off)}: {off[min(off)]}"


def test_criterion_11_simulate_certify_round_trip(tmp_path, capsys):
    out = tmp_path / "run"
    argv = ["simulate", "--d", "7", "--sigma", "4", "--target-q", "20,60",
            "--total-events", "50000", "--seed", "11", "--out", str(out)]
    assert main(argv) == 0
    for i in range(2):
        expected = json.loads((out / f"report_{i:03d}.json").read_text())
        capsys.readouterr()
        assert main(["certify", str(out / f"record_{i:03d}.json"), "--format", "json"]) == 0
        assert json.loads(capsys.readouterr().out) == expected
    again = tmp_path / "again"
    assert main(argv[:-1] + [str(again)]) == 0
    for name in sorted(p.name for p in out.iterdir()):
        assert (out / name).read_bytes() == (again / name).read_bytes()

"""Acceptance gate: one test (or test group) per numbered criterion.

A pass/fail line per criterion is printed in the terminal summary. Measured
values are attached with ``record_property("measured", ...)``.
"""

import math

import numpy as np
import pytest
from scipy.linalg import expm

from ham_adiabatic.bath import BathParams, criteria, gamma_rate, sample_bath
from ham_adiabatic.cli import main
from ham_adiabatic.config import preset
from ham_adiabatic.exact import ExactRunConfig, propagate_exact
from ham_adiabatic.ham import (ObservableSet, fit_effective_state, ham_propagate,
                               interaction_sampler, second_order_delta_alpha)
from ham_adiabatic.master import dephasing_spec, propagate_master
from ham_adiabatic.schedule import SearchModel, gap

from conftest import random_density
from test_bath import gamma_by_quadrature

acceptance = pytest.mark.acceptance


def time_average_gap(a, b):
    np.testing.assert_allclose(a.times, b.times, atol=1e-9)
    return float(np.mean(np.abs(a.p_success - b.p_success)))


# --- 1 ---------------------------------------------------------------------

@acceptance(1, "validity criteria c1, c2 at the reference parameters")
def test_criterion_1_criteria_numbers(capsys, record_property):
    assert main(["criteria", "--preset", "figure1"]) == 0
    rows = {float(r[0]): r for r in
            (line.split(",") for line in capsys.readouterr().out.splitlines()[2:])}
    for lam, c1, c2 in ((1e-4, 1.2, 7.2e-4), (5e-4, 6.0, 1.8e-2)):
        got1, got2 = float(rows[lam][2]), float(rows[lam][3])
        record_property("measured", f"lambda={lam:g}: c1={got1:.3g} c2={got2:.3g}")
        assert f"{got1:.3g}" == f"{c1:.3g}"
        assert f"{got2:.3g}" == f"{c2:.3g}"
        c = criteria(BathParams(2000, 0.5, lam, 12))
        assert (c.c1, c.c2) == pytest.approx((c1, c2), rel=1e-12)


# --- 2 ---------------------------------------------------------------------

@acceptance(2, "Grover time near 1e3")
def test_criterion_2_grover_time(record_property):
    t = SearchModel(12, 0.1).t_total
    record_property("measured", f"t_total={t:.2f}")
    assert 950 <= t <= 1050


# --- 3 ---------------------------------------------------------------------

@acceptance(3, "minimum gap 1/sqrt(N) at s=1/2")
@pytest.mark.parametrize("n", [4, 8, 12])
def test_criterion_3_minimum_gap(n, record_property):
    model = SearchModel(n, 0.1)
    s = np.linspace(0.0, 1.0, 20001)
    g = np.array([gap(x, model) for x in s])
    k = int(np.argmin(g))
    record_property("measured", f"N={model.N}: min gap - 1/sqrt(N) = {g[k] - model.N ** -0.5:.1e}")
    assert s[k] == 0.5
    assert abs(g[k] - 1 / math.sqrt(model.N)) <= 1e-12


# --- 4 ---------------------------------------------------------------------

@acceptance(4, "Gamma equals twice the correlation integral")
def test_criterion_4_gamma_consistency(record_property):
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(5):
        p = BathParams(int(rng.integers(100, 5000)), float(rng.uniform(0.1, 2.0)),
                       float(rng.uniform(1e-5, 1e-3)), int(rng.integers(2, 16)))
        rel = abs(gamma_by_quadrature(p) / gamma_rate(p) - 1)
        worst = max(worst, rel)
    record_property("measured", f"max rel err={worst:.1e}")
    assert worst < 0.01


# --- 5 ---------------------------------------------------------------------

@pytest.fixture(scope="module")
def full_scale_decoupled():
    model = SearchModel(12, 0.1)
    p = BathParams(2000, 0.5, 0.0, 12)
    return (propagate_exact(ExactRunConfig(model, sample_bath(p))),
            propagate_master(model, dephasing_spec(p)))


@acceptance(5, "decoupled adiabatic search succeeds, exact equals master")
def test_criterion_5_decoupled_success(full_scale_decoupled, record_property):
    exact, master = full_scale_decoupled
    dev = float(np.max(np.abs(exact.p_success - master.p_success)))
    record_property("measured", f"P_m(T)={exact.p_success[-1]:.6f} max|dP|={dev:.1e}")
    assert exact.p_success[-1] >= 0.9
    assert dev <= 1e-6


# --- 6 ---------------------------------------------------------------------

@acceptance(6, "pure dephasing closed form")
def test_criterion_6_pure_dephasing(record_property):
    p = BathParams(2000, 0.5, 5e-4, 12)
    g = gamma_rate(p)
    rho0 = np.full((2, 2), 0.5, dtype=complex)
    tr = propagate_master(SearchModel(12, 0.1), dephasing_spec(p), 0.02,
                          hamiltonian=lambda t: np.zeros((2, 2)), t_final=5 / g,
                          rho0=rho0, sample_interval=5 / g / 200)
    err = float(np.max(np.abs(np.abs(tr.rho_mp) - 0.5 * np.exp(-2 * g * tr.times))))
    record_property("measured", f"Gamma={g:.3g} max err={err:.1e}")
    assert tr.times[-1] == pytest.approx(5 / g)
    assert err <= 1e-8


# --- 7 ---------------------------------------------------------------------

DESK_SEEDS = range(5)


@pytest.fixture(scope="module")
def desk_runs():
    cfg = preset("desk")
    model = cfg.model
    out = {}
    for factor in (1, 10):
        lam = cfg.couplings[0] * factor
        master = propagate_master(model, dephasing_spec(cfg.bath_params(lam)))
        exact = [propagate_exact(ExactRunConfig(model, sample_bath(cfg.bath_params(lam, s))))
                 for s in DESK_SEEDS]
        out[factor] = (exact, master)
    return out


@acceptance(7, "exact vs master agreement degrades outside the validity regime")
def test_criterion_7_validity_ordering(desk_runs, record_property):
    cfg = preset("desk")
    assert criteria(cfg.bath_params(cfg.couplings[0])).satisfied
    stats = {}
    for factor, (exact, master) in desk_runs.items():
        stats[factor] = float(np.mean([time_average_gap(e, master) for e in exact]))
    record_property("measured", f"<|dP|> at lambda: {stats[1]:.4f}; at 10 lambda: {stats[10]:.4f}")
    assert stats[1] <= 0.05
    assert stats[10] > stats[1]


# --- 8 ---------------------------------------------------------------------

@pytest.fixture(scope="module")
def figure1_master():
    cfg = preset("figure1")
    return {lam: propagate_master(cfg.model, dephasing_spec(cfg.bath_params(lam)))
            for lam in cfg.couplings}


@acceptance(8, "strong coupling ends in an incoherent equal mixture")
def test_criterion_8_decoherence(figure1_master, record_property):
    tr = figure1_master[5e-4]
    record_property("measured", f"C(T)={tr.coherence[-1]:.3f} P_m(T)={tr.p_success[-1]:.3f}")
    assert tr.coherence[-1] < 0.3
    assert abs(tr.p_success[-1] - 0.5) < 0.15


# --- 9 ---------------------------------------------------------------------

@acceptance(9, "HAM machinery round trips")
def test_criterion_9_fit_round_trip(rng, record_property):
    d = 6
    ops = [np.diag((np.arange(d) == k).astype(float)) for k in range(d)]
    ops += [random_density(rng, d) for _ in range(3)]
    obs = ObservableSet(ops)
    b = rng.normal(size=len(ops))
    alpha = sum(bk * P for bk, P in zip(b, ops))
    alpha /= np.trace(alpha)
    fitted = fit_effective_state(obs, obs.expectations(alpha))
    err = float(np.max(np.abs(fitted.matrix - alpha)))
    record_property("measured", f"fit round trip err={err:.1e}")
    assert err <= 1e-12


@acceptance(9, "HAM machinery round trips")
def test_criterion_9_delta_alpha_third_order(record_property):
    cfg = preset("toy")
    p = cfg.bath_params(cfg.couplings[0], 0)
    V = interaction_sampler(sample_bath(p))
    n1 = p.n_levels
    psi = np.array([0.6, 0.8j])
    alpha = np.kron(np.outer(psi, psi.conj()), np.eye(n1) / n1)
    t0 = 3.0
    errs = []
    for tau in (0.4, 0.2, 0.1):
        m = 400
        h = tau / m
        U = np.eye(2 * n1, dtype=complex)
        for k in range(m):
            U = expm(-1j * h * V(t0 + (k + 0.5) * h)) @ U
        ref = U @ alpha @ U.conj().T - alpha
        errs.append(np.max(np.abs(second_order_delta_alpha(alpha, t0, tau, V, 65) - ref)))
    r1, r2 = errs[0] / errs[1], errs[1] / errs[2]
    record_property("measured", f"tau-halving error ratios {r1:.2f}, {r2:.2f}")
    assert 7 < r1 < 9
    assert 7 < r2 < 9


@acceptance(9, "HAM machinery round trips")
def test_criterion_9_ham_tracks_master(record_property):
    cfg = preset("toy")
    p = cfg.bath_params(cfg.couplings[0], 0)
    ham = ham_propagate(cfg.model, sample_bath(p), cfg.tau, cfg.quad_points)
    master = propagate_master(cfg.model, dephasing_spec(p))
    dev = time_average_gap(ham, master)
    record_property("measured", f"ham vs master <|dP|>={dev:.4f}")
    assert dev <= 0.05


# --- 10 --------------------------------------------------------------------

@acceptance(10, "numerical hygiene")
@pytest.mark.parametrize("name", ["figure1", "desk", "toy"])
def test_criterion_10_master_hygiene(name, record_property):
    cfg = preset(name)
    worst_trace, worst_eig = 0.0, 1.0
    for lam in cfg.couplings:
        tr = propagate_master(cfg.model, dephasing_spec(cfg.bath_params(lam)))
        worst_trace = max(worst_trace, float(np.max(np.abs(tr.drift))))
        worst_eig = min(worst_eig, float(np.min(tr.min_eig)))
    record_property("measured", f"{name} master: trace drift {worst_trace:.1e}, min eig {worst_eig:.1e}")
    assert worst_trace <= 1e-10
    assert worst_eig >= -1e-10


@acceptance(10, "numerical hygiene")
def test_criterion_10_exact_hygiene_small_presets(desk_runs, record_property):
    cfg = preset("toy")
    runs = [propagate_exact(ExactRunConfig(cfg.model, sample_bath(cfg.bath_params(lam, 0))))
            for lam in cfg.couplings]
    runs += desk_runs[1][0]
    worst = max(float(np.max(np.abs(r.drift))) for r in runs)
    record_property("measured", f"toy/desk exact norm drift {worst:.1e}")
    assert worst <= 1e-8


@acceptance(10, "numerical hygiene")
def test_criterion_10_exact_hygiene_figure1_decoupled(full_scale_decoupled, record_property):
    worst = float(np.max(np.abs(full_scale_decoupled[0].drift)))
    record_property("measured", f"figure1 lambda=0 exact norm drift {worst:.1e}")
    assert worst <= 1e-8


@acceptance(10, "numerical hygiene")
@pytest.mark.slow
@pytest.mark.parametrize("lam", [1e-4, 5e-4])
def test_criterion_10_exact_hygiene_figure1_coupled(lam, record_property):
    cfg = preset("figure1")
    tr = propagate_exact(ExactRunConfig(cfg.model, sample_bath(cfg.bath_params(lam, 0))))
    worst = float(np.max(np.abs(tr.drift)))
    record_property("measured", f"figure1 lambda={lam:g} exact norm drift {worst:.1e}")
    assert worst <= 1e-8


@acceptance(10, "numerical hygiene")
def test_criterion_10_rk4_order(record_property):
    cfg = preset("desk")
    bath = sample_bath(cfg.bath_params(cfg.couplings[0], 0))
    drifts = []
    for dt in (0.02, 0.01):
        tr = propagate_exact(ExactRunConfig(cfg.model, bath, dt=dt))
        drifts.append(float(np.max(np.abs(tr.drift))))
    record_property("measured", f"drift {drifts[0]:.2e} -> {drifts[1]:.2e} "
                                f"(ratio {drifts[0] / drifts[1]:.1f})")
    assert drifts[0] / drifts[1] >= 16

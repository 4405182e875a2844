import numpy as np
import pytest
from scipy.optimize import linear_sum_assignment

from siec.harness import (
    build_doubled,
    cut_to_str,
    detect_dip,
    dip_scan,
    general_model_dips,
    lambda_expectations,
    log_scaling_fit,
    measurement_identity_check,
    param_sweep,
    resolve_cut,
    ring_entropy,
    thread_budget,
)
from siec.models import coupled_ladder, nh_ssh, predefined

T_L = 1.2 * np.exp(0.3)
T_R = 1.2 * np.exp(-0.3)
DELTA = 1.6e-3
ODD = list(range(25, 50, 2))


# --- thread budget ---

def test_thread_budget(monkeypatch):
    monkeypatch.setenv("SIEC_THREADS", "3")
    assert thread_budget() == 3
    monkeypatch.setenv("SIEC_THREADS", "0")
    with pytest.raises(ValueError, match=">= 1"):
        thread_budget()
    monkeypatch.setenv("SIEC_THREADS", "many")
    with pytest.raises(ValueError, match="integer"):
        thread_budget()
    monkeypatch.delenv("SIEC_THREADS")
    assert thread_budget() >= 1


# --- cut rules ---

def test_resolve_cut():
    assert resolve_cut(None, 30) is None
    assert resolve_cut("half", 30) == (1, 15)
    assert resolve_cut("half", 41) == (1, 20)
    assert resolve_cut("single_cell", 41) == (1, 40)
    assert resolve_cut([3, 7], 30) == (3, 7)
    assert cut_to_str((1, 20)) == "1:20"
    assert cut_to_str(None) == ""


# --- dip scans ---

def test_dip_scan_records_failures_and_continues():
    recs, L_star, S_min = dip_scan(nh_ssh(T_L, T_R), DELTA, [41, 42, 43])
    assert [r.L for r in recs] == [41, 42, 43]
    assert recs[0].error == "" and recs[0].S is not None
    for r in recs[1:]:
        assert r.S is None
        assert "half_filling_override" in r.error
    assert L_star == 41
    for r in recs:
        np.testing.assert_allclose(r.L_c_pred, 42.790847413476264, rtol=1e-12)


def test_dip_scan_flagship_curve():
    recs, L_star, S_min = dip_scan(nh_ssh(T_L, T_R), DELTA, ODD, half_filling=True)
    assert all(r.error == "" for r in recs)
    assert L_star == 41
    np.testing.assert_allclose(S_min, -0.26019564298422637, rtol=1e-9)
    dip_L, prom = detect_dip([r.L for r in recs], [r.S for r in recs])
    assert dip_L == 41
    assert prom > 1.0
    assert recs[0].gap is not None and recs[0].min_r is not None


def test_dip_scan_uncoupled_control_is_flat():
    """Without the two-copy coupling there is no size-tuned transition."""
    recs, _, _ = dip_scan(nh_ssh(T_L, T_R), 0.0, list(range(25, 46, 2)))
    assert all(r.error == "" for r in recs)
    assert all(r.S > 0.9 for r in recs)
    dip_L, _ = detect_dip([r.L for r in recs], [r.S for r in recs])
    assert dip_L is None


def test_dip_scan_effective_path():
    recs, L_star, S_min = dip_scan(
        nh_ssh(T_L, T_R), DELTA, [31], path="effective")
    assert recs[0].source == "effective_gbz"
    np.testing.assert_allclose(recs[0].S, -0.4517160568523987, rtol=1e-9)


def test_dip_scan_argument_guards():
    with pytest.raises(ValueError, match="empty"):
        dip_scan(nh_ssh(T_L, T_R), DELTA, [])
    with pytest.raises(ValueError, match="effective path needs"):
        dip_scan(predefined("fig4b"), DELTA, [21], path="effective")
    recs, _, _ = dip_scan(nh_ssh(T_L, T_R), DELTA, [21], path="sideways")
    assert "unknown path" in recs[0].error


def test_detect_dip_synthetic_curves():
    Ls = [1, 2, 3, 4, 5]
    # flat negative: deep but not prominent
    L, prom = detect_dip(Ls, [-1.0, -1.001, -1.0, -1.0005, -1.0])
    assert L is None and prom < 0.01
    # oscillating positive: prominent but not deep
    assert detect_dip(Ls, [0.5, 0.1, 0.6, 0.2, 0.55])[0] is None
    # genuine dip
    L, prom = detect_dip(Ls, [0.0, -0.05, -2.0, -0.1, 0.05])
    assert L == 3
    np.testing.assert_allclose(prom, 2.0)
    # gaps in the data are skipped, not fatal
    L, _ = detect_dip(Ls, [-1.0, None, -3.0, None, -0.5])
    assert L == 3
    assert detect_dip(Ls, [None, None, -3.0, -0.5, -0.2]) == (None, 0.0)


# --- parameter sweep ---

def test_param_sweep_grid_and_ordering(monkeypatch):
    Ls = list(range(25, 42, 2))
    cells = param_sweep([1.0, np.exp(0.6)], [DELTA], Ls)
    assert len(cells) == 2
    assert [c.t_ratio for c in cells] == [1.0, np.exp(0.6)]
    np.testing.assert_allclose(cells[1].t_L, T_L, rtol=1e-12)
    np.testing.assert_allclose(cells[1].t_R, T_R, rtol=1e-12)
    assert cells[1].L_star == 41
    # the reciprocal point (ratio 1) has no skin effect and no dip
    assert cells[1].S_min < cells[0].S_min

    monkeypatch.setenv("SIEC_THREADS", "2")
    again = param_sweep([1.0, np.exp(0.6)], [DELTA], Ls)
    assert [(c.L_star, c.S_min) for c in again] == [(c.L_star, c.S_min) for c in cells]


def test_param_sweep_empty_grid():
    with pytest.raises(ValueError, match="nonempty"):
        param_sweep([], [DELTA], [21])


# --- log-law baselines ---

def test_ring_entropy_needs_even_size():
    with pytest.raises(ValueError, match="even L"):
        ring_entropy(predefined("hermitian_ssh"), 15, (1, 7))


def test_ring_entropy_log_growth():
    """Doubling L twice adds (1/3) log 4 for the critical reciprocal chain."""
    m = predefined("hermitian_ssh")
    s16 = ring_entropy(m, 16, (1, 8))
    s64 = ring_entropy(m, 64, (1, 32))
    np.testing.assert_allclose(s64 - s16, np.log(4.0) / 3.0, atol=0.01)


def test_log_scaling_fit_basics():
    slope, icpt, r2, pts = log_scaling_fit("hermitian_ssh", range(8, 41, 4))
    assert len(pts) == 9  # every even size is reported ...
    assert 0.25 < slope < 0.42  # ... but only L >= 12 shapes the fit
    assert r2 > 0.99


def test_log_scaling_fit_needs_enough_points():
    with pytest.raises(ValueError, match="at least 4 sizes"):
        log_scaling_fit("hermitian_ssh", range(16, 40, 8))


# --- generalized models ---

def test_general_model_dips_inversion_broken_variant():
    res = general_model_dips("fig4c", 1.2e-4, list(range(25, 38)), snapshot_L=[31])
    assert res.dip_L == 31
    assert res.prominence > 0.5
    np.testing.assert_allclose(res.S_min, -0.3251804986046207, rtol=1e-9)
    zs = res.gbz_snapshots[31]
    assert np.mean(np.isfinite(zs)) > 0.9
    assert 0.5 < res.gbz_median_abs[31] < 1.0


# --- doubled system ---

def test_build_doubled_rung_placement():
    base = coupled_ladder(nh_ssh(T_L, T_R), DELTA, 3)
    N = base.shape[0]
    dbl = build_doubled(base, 0.25)
    M = dbl.matrix
    assert M.shape == (2 * N, 2 * N)
    np.testing.assert_allclose(M[:N, :N], base, atol=1e-15)
    np.testing.assert_allclose(M[N:, N:], base.conj().T, atol=1e-15)
    assert M[0, 2 * N - 1] == 0.25 and M[N - 1, N] == 0.25
    assert M[2 * N - 1, 0] == 0.25 and M[N, N - 1] == 0.25
    assert np.count_nonzero(M[:N, N:]) == 2
    with pytest.raises(ValueError, match=">= 0"):
        build_doubled(base, -1e-6)


def test_doubled_uncoupled_spectrum_is_pair_of_conjugate_copies():
    base = coupled_ladder(nh_ssh(T_L, T_R), DELTA, 5)
    E = np.linalg.eigvals(build_doubled(base, 0.0).matrix)
    Eb = np.linalg.eigvals(base)
    ref = np.concatenate([Eb, Eb.conj()])
    cost = np.abs(E[:, None] - ref[None, :])
    rows, cols = linear_sum_assignment(cost)
    assert cost[rows, cols].max() < 1e-12


def test_measurement_identity():
    base = coupled_ladder(nh_ssh(T_L, T_R), DELTA, 10)
    dbl = build_doubled(base, 1e-6)
    lhs, rhs, diff = measurement_identity_check(dbl, np.eye(40))
    assert abs(rhs - 40.0) < 1e-9  # 2 Tr P at half filling
    assert abs(lhs - 40.0) < 1e-9
    rng = np.random.default_rng(2)
    for _ in range(3):
        A = rng.standard_normal((40, 40))
        lhs, rhs, diff = measurement_identity_check(dbl, A)
        assert diff / max(1.0, abs(rhs)) < 1e-7


def test_measurement_identity_guards():
    base = coupled_ladder(nh_ssh(T_L, T_R), DELTA, 10)
    dbl = build_doubled(base, 1e-6)
    with pytest.raises(ValueError, match="base space"):
        measurement_identity_check(dbl, np.eye(13))
    # without the rung the doubled eigenstates live in one block only and
    # the pair-operator expectation degenerates
    with pytest.raises(ValueError, match="ill-conditioned"):
        measurement_identity_check(build_doubled(base, 0.0), np.eye(40))


def test_lambda_expectations_definition():
    base = coupled_ladder(nh_ssh(T_L, T_R), DELTA, 4)
    dbl = build_doubled(base, 1e-6)
    Ed, lams, Vd = lambda_expectations(dbl)
    N = base.shape[0]
    assert Ed.shape == (2 * N,) and lams.shape == (2 * N,) and Vd.shape == (2 * N, 2 * N)
    for i in range(2 * N):
        u, v = Vd[:N, i], Vd[N:, i]
        np.testing.assert_allclose(lams[i], np.conj(v.T @ u), atol=1e-14)

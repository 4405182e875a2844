import numpy as np
import pytest

from siec.gbz import (
    alpha_constant,
    boundary_match_radius,
    char_poly_roots,
    delta_K,
    gbz_from_spectrum,
    k_grid,
    scale_gbz,
    ssh_params,
    standard_gbz,
)
from siec.models import (
    SIGMA_PLUS,
    BlochModel,
    chain_obc,
    chain_pbc,
    coupled_ladder,
    hermitian_ssh,
    nh_ssh,
    predefined,
)

T_L = 1.2 * np.exp(0.3)
T_R = 1.2 * np.exp(-0.3)
DELTA = 1.6e-3


# --- characteristic roots ---

def test_roots_satisfy_characteristic_equation():
    m = nh_ssh(T_L, T_R)
    rng = np.random.default_rng(3)
    for _ in range(12):
        E = rng.standard_normal() + 1j * rng.standard_normal()
        rs = char_poly_roots(m, E)
        assert len(rs.roots) == 2
        for z in rs.roots:
            assert abs(np.linalg.det(m.bloch(z) - E * np.eye(2))) < 1e-10


def test_root_product_is_coupling_ratio():
    """Vieta on  -t_L z^2 + (E^2 - t_L t_R - 1) z - t_R = 0:  z1 z2 = t_R/t_L."""
    m = nh_ssh(T_L, T_R)
    rng = np.random.default_rng(4)
    for _ in range(25):
        E = 2.0 * (rng.standard_normal() + 1j * rng.standard_normal())
        rs = char_poly_roots(m, E)
        assert abs(np.prod(rs.roots) - T_R / T_L) < 1e-10


def test_roots_sorted_by_modulus():
    rs = char_poly_roots(nh_ssh(T_L, T_R), 0.9 + 0.1j)
    mods = np.abs(rs.roots)
    assert np.all(np.diff(mods) >= -1e-12)


def test_hermitian_gapless_double_root():
    # at E = 0 the critical reciprocal chain has det = -(1+z)^2 / z
    rs = char_poly_roots(hermitian_ssh(1.0, 1.0), 0.0)
    np.testing.assert_allclose(rs.roots, [-1.0, -1.0], atol=1e-7)


def test_longer_range_model_has_three_roots():
    rs = char_poly_roots(predefined("fig4b"), 0.7)
    assert len(rs.roots) == 3


def test_degenerate_model_rejected():
    upper_only = BlochModel(hoppings={0: SIGMA_PLUS})
    with pytest.raises(ValueError, match="vanishes identically"):
        char_poly_roots(upper_only, 0.0)


def test_eigenvector_angle_consistent():
    """phi is the B/A amplitude ratio: H(z) (1, phi)^T = E (1, phi)^T."""
    m = nh_ssh(T_L, T_R)
    rs = char_poly_roots(m, 1.1 + 0.2j)
    for z, phi in zip(rs.roots, rs.phi):
        v = np.array([1.0, phi])
        resid = m.bloch(z) @ v - rs.energy * v
        assert np.linalg.norm(resid) < 1e-9


# --- momentum grid ---

def test_k_grid_values_and_parity():
    for L in (6, 7, 40, 41):
        ks = k_grid(L)
        assert len(ks) == L
        np.testing.assert_allclose(ks, 2 * np.pi * np.arange(1, L + 1) / (L + 1))
        assert (np.pi in ks) == (L % 2 == 1)


# --- closed forms ---

def test_ssh_params_recognition():
    assert ssh_params(nh_ssh(T_L, T_R)) == (T_L, T_R)
    assert ssh_params(hermitian_ssh(1.0, 1.0)) == (1.0, 1.0)
    assert ssh_params(predefined("fig4b")) is None
    assert ssh_params(predefined("fig4c")) is None
    assert ssh_params(hermitian_ssh(0.7, 1.3)) is None


def test_standard_gbz_radius():
    g = standard_gbz(nh_ssh(T_L, T_R), 20)
    np.testing.assert_allclose(g.radius, np.sqrt(T_R / T_L), rtol=1e-14)
    assert g.regime == "standard"
    with pytest.raises(ValueError, match="closed-form"):
        standard_gbz(predefined("fig4b"), 20)


def test_alpha_constant_value():
    np.testing.assert_allclose(alpha_constant(T_L, T_R), 3.612907679200476, rtol=1e-14)


def test_scale_gbz_critical_parameters():
    """alpha = -log|delta alpha_0| and the derived lengths/momentum."""
    g = scale_gbz(T_L, T_R, DELTA, 41)
    np.testing.assert_allclose(g.alpha, 5.153238750291367, rtol=1e-14)
    np.testing.assert_allclose(g.L_prime, 16.177462500971224, rtol=1e-12)
    np.testing.assert_allclose(g.L_c, 42.790847413476264, rtol=1e-12)
    np.testing.assert_allclose(g.K_c, np.pi + 0.1176784432060454j, rtol=1e-12)
    np.testing.assert_allclose(g.radius, np.exp(-g.alpha / 42.0), rtol=1e-14)
    assert g.regime == "scale_dependent"


def test_scale_gbz_small_chain_keeps_standard_radius():
    g = scale_gbz(T_L, T_R, DELTA, 10)
    np.testing.assert_allclose(g.radius, np.sqrt(T_R / T_L), rtol=1e-14)


def test_scale_gbz_radius_near_tR_at_Lc():
    g = scale_gbz(T_L, T_R, DELTA, 43)
    np.testing.assert_allclose(g.radius, T_R, rtol=2e-3)


def test_regime_continuity():
    """The two radius branches agree at the crossover length L'."""
    g = scale_gbz(T_L, T_R, DELTA, 41)
    assert abs(np.exp(-g.alpha / (g.L_prime + 1.0)) - np.sqrt(T_R / T_L)) < 1e-9


def test_scale_gbz_domain_errors():
    with pytest.raises(ValueError, match="delta must be > 0"):
        scale_gbz(T_L, T_R, 0.0, 41)
    with pytest.raises(ValueError, match="regime"):
        scale_gbz(0.9, 1.1, DELTA, 41)
    with pytest.raises(ValueError, match="weak-coupling"):
        scale_gbz(T_L, T_R, 0.5, 41)


def test_delta_K_vanishes_at_critical_point():
    g = scale_gbz(T_L, T_R, DELTA, 41)
    assert abs(delta_K(np.pi, g.L_c, g)) < 1e-14
    assert abs(delta_K(np.pi, 41, g)) > 1e-4
    with pytest.raises(ValueError, match="scale-dependent"):
        delta_K(np.pi, 20, standard_gbz(nh_ssh(T_L, T_R), 20))


# --- numeric extraction ---

def test_numeric_gbz_coupled_chain_clusters_on_predicted_circle():
    """Dense coupled-chain roots collapse onto |z| = e^{-alpha/(L+1)}."""
    L = 60
    target = np.exp(-scale_gbz(T_L, T_R, DELTA, L).alpha / (L + 1.0))
    E = np.linalg.eigvals(coupled_ladder(nh_ssh(T_L, T_R), DELTA, L))
    zs = gbz_from_spectrum(nh_ssh(T_L, T_R), E)
    mods = np.abs(zs[np.isfinite(zs)])
    frac = np.mean(np.abs(mods - target) < 0.02 * target)
    assert frac >= 0.85
    assert abs(np.median(mods) - target) < 0.02 * target


def test_numeric_gbz_uncoupled_chain():
    m = nh_ssh(T_L, T_R)
    E = np.linalg.eigvals(chain_obc(m, 40))
    zs = gbz_from_spectrum(m, E)
    target = np.sqrt(T_R / T_L)
    assert np.all(np.abs(np.abs(zs) - target) < 0.02 * target)


def test_numeric_gbz_hermitian_ring_is_unit_circle():
    m = hermitian_ssh(1.0, 1.0)
    E = np.linalg.eigvals(chain_pbc(m, 32))
    zs = gbz_from_spectrum(m, E)
    assert np.max(np.abs(np.abs(zs) - 1.0)) < 1e-6


def test_numeric_gbz_marks_failures_nan():
    upper_only = BlochModel(hoppings={0: SIGMA_PLUS})
    zs = gbz_from_spectrum(upper_only, [0.0, 0.0])
    assert np.all(np.isnan(zs))


def test_numeric_gbz_unknown_rule():
    with pytest.raises(ValueError, match="selection"):
        gbz_from_spectrum(nh_ssh(T_L, T_R), [1.0], selection="fastest")


# --- boundary matching ---

def test_boundary_match_weak_coupling_recovers_standard_radius():
    res = boundary_match_radius(T_L, T_R, 1e-9, 40)
    assert res.converged
    np.testing.assert_allclose(abs(res.z1), np.sqrt(T_R / T_L), rtol=1e-6)
    assert res.residual < 1e-10


def test_boundary_match_approaches_scaled_radius():
    """At large L the matched |z1| drifts to the size-dependent circle."""
    for L in (150, 200):
        g = scale_gbz(T_L, T_R, DELTA, L)
        res = boundary_match_radius(T_L, T_R, DELTA, L)
        assert res.converged
        rel = abs(abs(res.z1) - g.radius) / g.radius
        assert rel < 0.01

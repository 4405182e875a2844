"""Generalized Brillouin zones: roots, closed forms, and numeric extraction.

The closed-form path covers the nonreciprocal two-band chain (upper hopping
t_L + 1/z, lower t_R + z).  For everything else the numeric route
(`gbz_from_spectrum`) extracts per-energy roots from the characteristic
polynomial.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .models import BlochModel


# ---------------------------------------------------------------------------
# characteristic polynomial
# ---------------------------------------------------------------------------

@dataclass
class RootSet:
    """Roots of det(H(z) - E) = 0 at one energy, ascending |z| (ties by arg)."""

    energy: complex
    roots: np.ndarray
    phi: np.ndarray  # eigenvector angle per root (2-band models)


def _laurent_det_2band(model: BlochModel, E: complex) -> dict:
    """Laurent coefficients of det(H(z) - E) for a two-band model."""
    a = {}  # H11 - E
    b = {}  # H12
    c = {}  # H21
    d = {}  # H22 - E
    for dx, blk in model.hoppings.items():
        a[dx] = a.get(dx, 0.0) + blk[0, 0]
        b[dx] = b.get(dx, 0.0) + blk[0, 1]
        c[dx] = c.get(dx, 0.0) + blk[1, 0]
        d[dx] = d.get(dx, 0.0) + blk[1, 1]
    a[0] = a.get(0, 0.0) - E
    d[0] = d.get(0, 0.0) - E

    def mul(p, q):
        out = {}
        for i, pi in p.items():
            for j, qj in q.items():
                out[i + j] = out.get(i + j, 0.0) + pi * qj
        return out

    ad = mul(a, d)
    bc = mul(b, c)
    det = dict(ad)
    for k, v in bc.items():
        det[k] = det.get(k, 0.0) - v
    return det


def char_poly_roots(model: BlochModel, E: complex) -> RootSet:
    """All roots (with multiplicity) of det(H(z) - E) = 0.

    Negative powers are cleared by multiplying with z^(m_max * n_bands); the
    resulting ordinary polynomial is solved exactly once.  Roots are sorted
    by ascending modulus, ties by ascending argument.
    """
    if model.n_bands != 2:
        raise ValueError("characteristic-root path implemented for two-band models")
    det = _laurent_det_2band(model, complex(E))
    shift = model.m_max * model.n_bands
    deg_max = max(det) + shift
    coeffs = np.zeros(deg_max + 1, dtype=complex)  # descending powers for np.roots
    for k, v in det.items():
        coeffs[deg_max - (k + shift)] = v
    if np.max(np.abs(coeffs)) == 0.0:
        raise ValueError("characteristic polynomial vanishes identically (degenerate model)")
    # Leading zeros are harmless; trailing zeros are z=0 artifacts of the
    # blanket z^shift clearing factor (the minimal clearing power may be
    # smaller), so divide them out before solving.
    nz = np.nonzero(np.abs(coeffs) > 0.0)[0]
    coeffs = coeffs[nz[0]:nz[-1] + 1]
    roots = np.roots(coeffs)
    order = np.lexsort((np.angle(roots), np.abs(roots)))
    roots = roots[order]

    phi = np.empty(len(roots), dtype=complex)
    for i, z in enumerate(roots):
        H = model.bloch(z)
        if abs(complex(E) - H[1, 1]) > 1e-300:
            phi[i] = H[1, 0] / (complex(E) - H[1, 1])
        elif abs(H[0, 1]) > 1e-300:
            phi[i] = (complex(E) - H[0, 0]) / H[0, 1]
        else:
            phi[i] = np.nan
    return RootSet(energy=complex(E), roots=roots, phi=phi)


# ---------------------------------------------------------------------------
# closed-form GBZ family
# ---------------------------------------------------------------------------

def ssh_params(model: BlochModel) -> Optional[Tuple[float, float]]:
    """(t_L, t_R) when the model is the nonreciprocal two-band chain, else None."""
    if model.n_bands != 2 or set(model.hoppings) != {-1, 0, 1}:
        return None
    h0, hm, hp = model.hoppings[0], model.hoppings[-1], model.hoppings[1]
    ok = (
        abs(h0[0, 0]) < 1e-14 and abs(h0[1, 1]) < 1e-14
        and np.allclose(hm, [[0, 1], [0, 0]], atol=1e-14)
        and np.allclose(hp, [[0, 0], [1, 0]], atol=1e-14)
        and abs(h0[0, 1].imag) < 1e-14 and abs(h0[1, 0].imag) < 1e-14
    )
    if not ok:
        return None
    return float(h0[0, 1].real), float(h0[1, 0].real)


@dataclass
class GbzResult:
    """GBZ sample points plus the scale-dependent critical parameters."""

    points: List[Tuple[float, complex, complex]]  # (k, z, K = -i log z)
    L: int
    regime: str  # standard | scale_dependent | numeric
    alpha: Optional[float] = None
    L_prime: Optional[float] = None
    L_c: Optional[float] = None
    K_c: Optional[complex] = None

    @property
    def radius(self) -> float:
        return float(abs(self.points[0][1])) if self.points else float("nan")


def k_grid(L: int) -> np.ndarray:
    """Open-chain momentum grid 2 pi m / (L+1), m = 1..L (pi included iff L odd)."""
    return 2.0 * np.pi * np.arange(1, L + 1) / (L + 1)


def standard_gbz(model: BlochModel, L: int) -> GbzResult:
    """Size-independent GBZ of the uncoupled chain: |z| = sqrt|t_R / t_L|."""
    pars = ssh_params(model)
    if pars is None:
        raise ValueError(
            "standard_gbz covers the closed-form two-band chain only; "
            "use gbz_from_spectrum for general models"
        )
    t_L, t_R = pars
    r = np.sqrt(abs(t_R / t_L))
    pts = []
    for k in k_grid(L):
        z = r * np.exp(1j * k)
        pts.append((float(k), complex(z), complex(-1j * np.log(z))))
    return GbzResult(points=pts, L=L, regime="standard")


def alpha_constant(t_L: float, t_R: float) -> float:
    """The combination alpha_0 = t_R (t_R - t_L) / (t_L (t_R - 1))."""
    return t_R * (t_R - t_L) / (t_L * (t_R - 1.0))


def scale_gbz(t_L: float, t_R: float, delta: float, L: int) -> GbzResult:
    """Closed-form size-dependent GBZ of the coupled chain.

    alpha = -log|delta * alpha_0|; the radius is sqrt(t_R/t_L) up to the
    crossover length L' and e^{-alpha/(L+1)} beyond it.  Also carries the
    critical length L_c (radius reaching t_R) and the critical momentum
    K_c = pi + i alpha/(L_c + 1).
    """
    if delta <= 0:
        raise ValueError("delta must be > 0 for the scale-dependent GBZ")
    if not (0.0 < t_R < 1.0 < t_L):
        raise ValueError(
            f"couplings outside the derivation's regime 0 < t_R < 1 < t_L: "
            f"t_L={t_L}, t_R={t_R}"
        )
    a0 = alpha_constant(t_L, t_R)
    alpha = -np.log(abs(delta * a0))
    if alpha <= 0:
        raise ValueError(
            f"alpha = {alpha:.4f} <= 0: coupling delta={delta} too large for the "
            "weak-coupling expansion (needs |delta * alpha_0| < 1)"
        )
    r_std = np.sqrt(t_R / t_L)
    L_prime = -alpha / np.log(r_std) - 1.0
    L_c = -alpha / np.log(t_R) - 1.0
    K_c = np.pi + 1j * alpha / (L_c + 1.0)
    r = r_std if L <= L_prime else np.exp(-alpha / (L + 1.0))
    pts = []
    for k in k_grid(L):
        z = r * np.exp(1j * k)
        pts.append((float(k), complex(z), complex(-1j * np.log(z))))
    return GbzResult(
        points=pts, L=L, regime="scale_dependent",
        alpha=float(alpha), L_prime=float(L_prime), L_c=float(L_c), K_c=complex(K_c),
    )


def delta_K(k: float, L: int, gbz: GbzResult) -> complex:
    """Distance from the critical momentum: (k - pi) + i alpha (1/(L+1) - 1/(L_c+1))."""
    if gbz.regime != "scale_dependent":
        raise ValueError("delta_K needs a scale-dependent GBZ result")
    return (k - np.pi) + 1j * gbz.alpha * (1.0 / (L + 1.0) - 1.0 / (gbz.L_c + 1.0))


# ---------------------------------------------------------------------------
# numeric extraction
# ---------------------------------------------------------------------------

def gbz_from_spectrum(
    model: BlochModel,
    energies: Sequence[complex],
    selection: str = "slowest_inside",
) -> np.ndarray:
    """Per-energy GBZ roots extracted from a dense spectrum.

    The default rule picks the largest-modulus root with |z| <= 1 + 1e-9
    (the slowest-decaying physical solution); when every root lies outside
    the unit circle the smallest one is taken.  A failed root solve marks
    that entry NaN instead of aborting the batch.
    """
    if selection != "slowest_inside":
        raise ValueError(f"unknown selection rule '{selection}'")
    out = np.empty(len(energies), dtype=complex)
    for i, E in enumerate(energies):
        try:
            rs = char_poly_roots(model, E)
            inside = rs.roots[np.abs(rs.roots) <= 1.0 + 1e-9]
            out[i] = inside[-1] if len(inside) else rs.roots[0]
        except (ValueError, np.linalg.LinAlgError):
            out[i] = np.nan
    return out


# ---------------------------------------------------------------------------
# boundary matching
# ---------------------------------------------------------------------------

@dataclass
class BoundaryMatchResult:
    z1: complex
    iterations: int
    residual: float
    converged: bool


def boundary_match_radius(
    t_L: float,
    t_R: float,
    delta: float,
    L: int,
    E_probe: complex = 1.0,
    max_iter: int = 100,
) -> BoundaryMatchResult:
    """Self-consistent dominant root of the open-ladder matching condition.

    Solves  z1^(L+1) = b + sqrt(b^2 + d)  (larger root) with

        b = delta (z1 phi_{z2} - z2 phi_{z1}) / (2 phi_{z2}),
        d = (t_R/t_L)^(L+1) phi_{z1} / phi_{z2},
        z2 = (t_R/t_L) / z1,   phi_z = (t_R + z) / E,

    iterating from the closed-form radius seeded at arg pi.  E is
    re-evaluated from the dispersion at the current z1, on the square-root
    branch closer to E_probe.  Non-convergence is reported, not raised.
    """
    ratio = t_R / t_L
    try:
        seed = scale_gbz(t_L, t_R, delta, L)
        r0 = seed.radius
    except ValueError:
        r0 = np.sqrt(abs(ratio))
    z1 = complex(-r0, 0.0)

    def parts(z1):
        z2 = ratio / z1
        E2 = (t_L + 1.0 / z1) * (t_R + z1)
        E = np.sqrt(complex(E2))
        if abs(E - E_probe) > abs(-E - E_probe):
            E = -E
        phi1 = (t_R + z1) / E
        phi2 = (t_R + z2) / E
        b = delta * (z1 * phi2 - z2 * phi1) / (2.0 * phi2)
        d = ratio ** (L + 1) * phi1 / phi2
        return b, d

    it = 0
    converged = False
    for it in range(1, max_iter + 1):
        b, d = parts(z1)
        s = np.sqrt(complex(b * b + d))
        u = b + s if abs(b + s) >= abs(b - s) else b - s
        mag = abs(u) ** (1.0 / (L + 1))
        ang = np.angle(u)
        cands = mag * np.exp(1j * (ang + 2.0 * np.pi * np.arange(L + 1)) / (L + 1))
        z1_new = cands[np.argmin(np.abs(cands - z1))]
        if abs(z1_new - z1) < 1e-12 * abs(z1_new):
            z1 = z1_new
            converged = True
            break
        z1 = z1_new

    b, d = parts(z1)
    u = z1 ** (L + 1)
    residual = float(abs(u * u - 2.0 * b * u - d))
    return BoundaryMatchResult(z1=complex(z1), iterations=it, residual=residual, converged=converged)

"""Dense non-symmetric eigendecomposition with biorthogonal left/right pairing."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

DEFECTIVE_REL_TOL = 1e-10


@dataclass
class EigenSystem:
    """Paired left/right eigendecomposition of a dense complex matrix.

    ``right_vectors[:, n]`` and ``left_vectors[:, n]`` belong to
    ``energies[n]`` and are rescaled so that <psi^L_n | psi^R_n> = 1
    (except for defective states, which keep their raw vectors).
    """

    energies: np.ndarray
    right_vectors: np.ndarray
    left_vectors: np.ndarray
    pairing_residual: float
    defective_flags: np.ndarray
    raw_overlaps: np.ndarray = field(default=None, repr=False)
    tie_broken: bool = False

    @property
    def n_states(self) -> int:
        return len(self.energies)


@dataclass
class RigidityReport:
    r: np.ndarray
    min_r: float
    argmin: int


def _degenerate_clusters(energies, tol):
    """Group indices of (already paired) energies that coincide within tol."""
    order = np.lexsort((energies.imag, energies.real))
    clusters = []
    current = [order[0]]
    for idx in order[1:]:
        if abs(energies[idx] - energies[current[-1]]) <= tol:
            current.append(idx)
        else:
            clusters.append(current)
            current = [idx]
    clusters.append(current)
    return clusters


def eig_biorthogonal(M: np.ndarray) -> EigenSystem:
    """Diagonalize M and its adjoint, pairing states biorthogonally.

    Right vectors come from M, left vectors from a second decomposition of
    M-dagger (robust near defective points, unlike inverting the
    right-eigenvector matrix).  Pairing matches eigenvalues of M against
    conjugated eigenvalues of M-dagger by global minimum-cost assignment; a
    near-degenerate tie (an alternative assignment within 1e-12 total
    distance) falls back to lexicographic (Re, Im) ordering on both sides
    and is recorded via ``tie_broken``.  Exactly degenerate levels are
    re-biorthogonalized blockwise, so <psi^L_m|psi^R_n> = delta_mn holds
    inside degenerate multiplets too.
    """
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"matrix must be square, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix contains non-finite entries")
    try:
        E, V = np.linalg.eig(M)
        Ed, U = np.linalg.eig(M.conj().T)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - backend failure
        raise RuntimeError(f"eigensolver did not converge: {exc}") from exc

    target = np.conj(Ed)
    cost = np.abs(E[:, None] - target[None, :])
    rows, cols = linear_sum_assignment(cost)

    # Tie check: can any two assignments be swapped at < 1e-12 extra cost?
    assigned = cost[rows, cols]
    X = cost[np.ix_(rows, cols)]
    swap_extra = X + X.T - assigned[:, None] - assigned[None, :]
    np.fill_diagonal(swap_extra, np.inf)
    tie = bool(np.min(swap_extra) < 1e-12)
    if tie:
        rows = np.lexsort((E.imag, E.real))
        cols = np.lexsort((target.imag, target.real))

    E_out = E[rows]
    V_out = V[:, rows]
    U_out = U[:, cols]

    scale = max(1.0, float(np.max(np.abs(E_out))))
    clusters = _degenerate_clusters(E_out, tol=1e-11 * scale)

    left = U_out.copy()
    n = len(E_out)
    defective = np.zeros(n, dtype=bool)
    for cl in clusters:
        cl = list(cl)
        Ub = U_out[:, cl]
        Vb = V_out[:, cl]
        O = Ub.conj().T @ Vb
        nl = np.linalg.norm(Ub, axis=0)
        nr = np.linalg.norm(Vb, axis=0)
        smin = np.min(np.linalg.svd(O / np.outer(nl, nr), compute_uv=False))
        if smin < DEFECTIVE_REL_TOL:
            defective[cl] = True
            continue
        # solve A such that (Ub A)^dagger Vb = I  ->  A = (O^{-1})^dagger
        left[:, cl] = Ub @ np.linalg.inv(O).conj().T

    raw = np.einsum("ij,ij->j", np.conj(U_out), V_out)
    good = ~defective
    if good.any():
        post = np.einsum("ij,ij->j", np.conj(left[:, good]), V_out[:, good])
        residual = float(np.max(np.abs(post - 1.0)))
    else:
        residual = float("nan")

    return EigenSystem(
        energies=E_out,
        right_vectors=V_out,
        left_vectors=left,
        pairing_residual=residual,
        defective_flags=defective,
        raw_overlaps=raw,
        tie_broken=tie,
    )


def phase_rigidity(eigsys: EigenSystem) -> RigidityReport:
    """r_n = |<psi^L|psi^R>| / (|psi^L| |psi^R|) from the unnormalized pairs."""
    normsL = np.linalg.norm(eigsys.left_vectors, axis=0)
    normsR = np.linalg.norm(eigsys.right_vectors, axis=0)
    ov = np.einsum("ij,ij->j", np.conj(eigsys.left_vectors), eigsys.right_vectors)
    r = np.abs(ov) / (normsL * normsR)
    amin = int(np.argmin(r))
    return RigidityReport(r=r, min_r=float(r[amin]), argmin=amin)


def spectral_gap(eigsys: EigenSystem) -> float:
    """Minimum |E_n| over the spectrum."""
    if eigsys.n_states == 0:
        raise ValueError("empty spectrum")
    return float(np.min(np.abs(eigsys.energies)))

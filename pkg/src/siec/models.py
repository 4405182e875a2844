"""Laurent-polynomial Bloch models and real-space chain builders.

A model is a mapping from integer cell offsets to complex hopping blocks:
``hoppings[dx]`` is the n_bands x n_bands block connecting cell x to cell
x+dx, so the Bloch symbol is H(z) = sum_dx hoppings[dx] * z^dx with
z = e^{ik}.  Real-space matrices use the convention

    block(x, x') = hoppings[x' - x]

with cell-major, sublattice-minor ordering (A, B within each cell).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict

import numpy as np

SIGMA_PLUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
SIGMA_MINUS = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)


@dataclass(frozen=True)
class BlochModel:
    """Immutable Laurent-polynomial tight-binding model.

    Attributes
    ----------
    hoppings : dict
        Maps cell offset dx -> (n_bands, n_bands) complex block.
    n_bands : int
        Bands per unit cell.
    name : str
        Human-readable tag carried into run records.
    """

    hoppings: Dict[int, np.ndarray]
    n_bands: int = 2
    name: str = "custom"

    def __post_init__(self):
        frozen = {}
        for dx, blk in self.hoppings.items():
            arr = np.asarray(blk, dtype=complex)
            if arr.shape != (self.n_bands, self.n_bands):
                raise ValueError(
                    f"hopping block at offset {dx} has shape {arr.shape}, "
                    f"expected ({self.n_bands}, {self.n_bands})"
                )
            arr.setflags(write=False)
            frozen[int(dx)] = arr
        object.__setattr__(self, "hoppings", frozen)

    @property
    def m_max(self) -> int:
        """Largest |offset| appearing in the Laurent polynomial."""
        return max(abs(dx) for dx in self.hoppings)

    def bloch(self, z: complex) -> np.ndarray:
        """Evaluate the symbol H(z) at a (possibly complex) z."""
        H = np.zeros((self.n_bands, self.n_bands), dtype=complex)
        for dx, blk in self.hoppings.items():
            H = H + blk * (z ** dx)
        return H

    def bloch_k(self, k: complex) -> np.ndarray:
        """Evaluate H at momentum k, i.e. z = e^{ik} (k may be complex)."""
        return self.bloch(np.exp(1j * k))

    def is_hermitian(self, n_samples: int = 16, tol: float = 1e-10) -> bool:
        """True when H(e^{ik}) is Hermitian on a real-k sample grid."""
        for k in np.linspace(0.0, 2.0 * np.pi, n_samples, endpoint=False):
            H = self.bloch_k(k)
            if np.max(np.abs(H - H.conj().T)) > tol:
                return False
        return True


def nh_ssh(t_L: float, t_R: float) -> BlochModel:
    """Nonreciprocal two-band chain H(z) = (t_L + 1/z) s+ + (t_R + z) s-."""
    hop = {
        0: t_L * SIGMA_PLUS + t_R * SIGMA_MINUS,
        -1: SIGMA_PLUS.copy(),
        1: SIGMA_MINUS.copy(),
    }
    return BlochModel(hoppings=hop, name="nh_ssh")


def hermitian_ssh(t1: float = 1.0, t2: float = 1.0) -> BlochModel:
    """Reciprocal SSH chain: H(z) = (t1 + t2 z) s- + (t1 + t2/z) s+."""
    hop = {
        0: t1 * (SIGMA_PLUS + SIGMA_MINUS),
        1: t2 * SIGMA_MINUS,
        -1: t2 * SIGMA_PLUS,
    }
    return BlochModel(hoppings=hop, name="hermitian_ssh")


def _fig4b(t_L: float, t_R: float) -> BlochModel:
    # longer-range upper hopping: (t_L + z^{-2}/3) s+ + (t_R + z) s-
    hop = {
        0: t_L * SIGMA_PLUS + t_R * SIGMA_MINUS,
        -2: SIGMA_PLUS / 3.0,
        1: SIGMA_MINUS.copy(),
    }
    return BlochModel(hoppings=hop, name="fig4b")


def _fig4c(t_L: float) -> BlochModel:
    # inversion-broken variant: t_L s+ + (0.6 + 0.12i + z + 0.1 z^{-2}) s-
    hop = {
        0: t_L * SIGMA_PLUS + (0.6 + 0.12j) * SIGMA_MINUS,
        1: SIGMA_MINUS.copy(),
        -2: 0.1 * SIGMA_MINUS,
    }
    return BlochModel(hoppings=hop, name="fig4c")


def _ep_chain() -> BlochModel:
    # k-dependent coefficients (2 - 2cos k) = 2 - z - 1/z normalized to pure
    # Laurent form:
    #   s+ coefficient: (2 - z - 1/z) z + 1 = 2z - z^2
    #   s- coefficient: (2 - z - 1/z) / z = 2/z - 1 - 1/z^2
    # At z = 1 the symbol is the Jordan block [[0, 1], [0, 0]].
    hop = {
        0: -1.0 * SIGMA_MINUS,
        1: 2.0 * SIGMA_PLUS,
        2: -1.0 * SIGMA_PLUS,
        -1: 2.0 * SIGMA_MINUS,
        -2: -1.0 * SIGMA_MINUS,
    }
    return BlochModel(hoppings=hop, name="ep_model_s11")


def _long_range_coupled(t_L: float, t_R: float, B: int, t: float = 1.0) -> BlochModel:
    hop = {
        0: t_L * SIGMA_PLUS + t_R * SIGMA_MINUS,
        -B: t * SIGMA_PLUS,
        B: t * SIGMA_MINUS,
    }
    return BlochModel(hoppings=hop, name=f"nhse_B{B}")


_T_L_DEFAULT = 1.2 * np.exp(0.3)
_T_R_DEFAULT = 1.2 * np.exp(-0.3)


def predefined(name: str, t_L: float | None = None, t_R: float | None = None) -> BlochModel:
    """Build one of the named models used across the experiment suite.

    ``t_L``/``t_R`` override the per-model defaults where the model has
    such parameters; models with fully pinned couplings ignore them.
    """
    tl = _T_L_DEFAULT if t_L is None else float(t_L)
    tr = _T_R_DEFAULT if t_R is None else float(t_R)
    table = {
        "nh_ssh": lambda: nh_ssh(tl, tr),
        "fig4a": lambda: nh_ssh(tl, tr),
        "fig4b": lambda: _fig4b(tl, tr),
        "fig4c": lambda: _fig4c(tl),
        "hermitian_ssh": lambda: hermitian_ssh(1.0, 1.0),
        "nhse_ssh_s11": lambda: nh_ssh(1.0, 0.5),
        "ep_model_s11": _ep_chain,
        "nhse_B2": lambda: _long_range_coupled(1.62, 0.89, 2),
        "nhse_B3": lambda: _long_range_coupled(1.62, 0.89, 3),
    }
    if name not in table:
        raise KeyError(f"unknown model '{name}'; known: {sorted(table)}")
    model = table[name]()
    return model


MODEL_NAMES = (
    "nh_ssh",
    "fig4a",
    "fig4b",
    "fig4c",
    "hermitian_ssh",
    "nhse_ssh_s11",
    "ep_model_s11",
    "nhse_B2",
    "nhse_B3",
)


def chain_obc(model: BlochModel, L: int) -> np.ndarray:
    """Dense open-boundary matrix for L unit cells.

    Raises a configuration error when the hopping range reaches across
    the whole chain (m_max >= L), because the open chain then has no
    bulk at all and the block stencil is ill-defined.
    """
    if model.m_max >= L:
        raise ValueError(
            f"hopping range m_max={model.m_max} must be < L={L} under open boundaries"
        )
    n = model.n_bands
    M = np.zeros((n * L, n * L), dtype=complex)
    for dx, blk in model.hoppings.items():
        for x in range(1, L + 1):
            xp = x + dx
            if 1 <= xp <= L:
                M[(x - 1) * n:x * n, (xp - 1) * n:xp * n] += blk
    return M


def chain_pbc(model: BlochModel, L: int) -> np.ndarray:
    """Dense periodic (ring) matrix for L unit cells."""
    if model.m_max >= L:
        raise ValueError(f"hopping range m_max={model.m_max} must be < L={L}")
    n = model.n_bands
    M = np.zeros((n * L, n * L), dtype=complex)
    for dx, blk in model.hoppings.items():
        for x in range(1, L + 1):
            xp = (x - 1 + dx) % L + 1
            M[(x - 1) * n:x * n, (xp - 1) * n:xp * n] += blk
    return M


def coupled_ladder(model: BlochModel, delta: float, L: int) -> np.ndarray:
    """Two copies of the open chain coupled site-by-site.

    The second chain carries the transposed Hamiltonian, and every site of
    chain one is tied to its partner with strength delta:

        [[H_obc, delta*I], [delta*I, H_obc^T]]

    Dimension is 2 * n_bands * L (= 4L for two-band models).  Ordering is
    chain-major: all of chain one's sites first, then chain two's.
    """
    H = chain_obc(model, L)
    N = H.shape[0]
    dI = float(delta) * np.eye(N, dtype=complex)
    return np.block([[H, dI], [dI, H.T]])


def inversion_operator(L: int, n_bands: int = 2) -> np.ndarray:
    """Matrix of the ladder symmetry: position reversal x chain swap x sublattice swap.

    Acts on the 2*n_bands*L coupled space.  For the nonreciprocal SSH
    ladder this operator commutes with the coupled matrix.
    """
    N = n_bands * L
    # position reversal combined with sublattice swap within one chain
    R = np.zeros((N, N))
    sx = np.array([[0.0, 1.0], [1.0, 0.0]]) if n_bands == 2 else np.eye(n_bands)
    for x in range(1, L + 1):
        xr = L + 1 - x
        R[(xr - 1) * n_bands:xr * n_bands, (x - 1) * n_bands:x * n_bands] = sx
    swap = np.array([[0.0, 1.0], [1.0, 0.0]])
    return np.kron(swap, R)

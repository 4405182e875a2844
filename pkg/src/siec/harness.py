"""Experiment drivers: dip scans, parameter sweeps, log-law baselines,
generalized-model scans, and the doubled-system measurement identity."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import models as mdl
from . import spectral as spec
from .entanglement import (
    CorrelationMatrix,
    effective_corr_matrix,
    entanglement,
    occupied_projector,
    projector_symbol,
    truncate,
)
from .gbz import gbz_from_spectrum, scale_gbz, ssh_params


def thread_budget() -> int:
    """Worker-thread bound from SIEC_THREADS (defaults to the CPU count)."""
    raw = os.environ.get("SIEC_THREADS", "")
    if raw.strip():
        try:
            n = int(raw)
        except ValueError:
            raise ValueError(f"SIEC_THREADS must be an integer, got {raw!r}")
        if n < 1:
            raise ValueError(f"SIEC_THREADS must be >= 1, got {n}")
        return n
    return os.cpu_count() or 1


# ---------------------------------------------------------------------------
# scan records
# ---------------------------------------------------------------------------

@dataclass
class ScanRecord:
    """One evaluated (model, delta, L, cut) point, one CSV row."""

    model: str
    t_L: Optional[float]
    t_R: Optional[float]
    delta: float
    L: int
    cut: str                      # "xL:xR" or "" for no cut
    source: str                   # dense_physical | effective_gbz
    S: Optional[float] = None
    S2: Optional[float] = None
    gap: Optional[float] = None
    min_r: Optional[float] = None
    L_c_pred: Optional[float] = None
    im_residual: Optional[float] = None
    fermi_rule: str = ""
    error: str = ""
    timestamp: str = ""
    tag: str = ""
    # full entanglement spectrum; kept off the CSV row, emitted as JSON on demand
    p_spectrum: Optional[np.ndarray] = field(default=None, compare=False, repr=False)


def cut_to_str(cut: Optional[Tuple[int, int]]) -> str:
    return "" if cut is None else f"{int(cut[0])}:{int(cut[1])}"


def resolve_cut(rule, L: int) -> Optional[Tuple[int, int]]:
    """cut_rule -> concrete interval: 'half', 'single_cell', None, or [a, b]."""
    if rule is None:
        return None
    if rule == "half":
        return (1, L // 2)
    if rule == "single_cell":
        return (1, L - 1)
    a, b = int(rule[0]), int(rule[1])
    return (a, b)


def _dense_point(model: mdl.BlochModel, delta: float, L: int, cut, half_filling: bool):
    M = mdl.coupled_ladder(model, delta, L)
    es = spec.eig_biorthogonal(M)
    gap = spec.spectral_gap(es)
    min_r = spec.phase_rigidity(es).min_r
    P = occupied_projector(es, half_filling_override=half_filling)
    corr = truncate(P, cut, L, hermitian_parent=model.is_hermitian())
    res = entanglement(corr)
    return res, gap, min_r, P.fermi_rule


def dip_scan(
    model: mdl.BlochModel,
    delta: float,
    L_range: Sequence[int],
    cut_rule="half",
    path: str = "dense",
    t_L: Optional[float] = None,
    t_R: Optional[float] = None,
    half_filling: bool = False,
) -> Tuple[List[ScanRecord], Optional[int], Optional[float]]:
    """Scan S over L; returns (records, argmin L*, S_min).

    ``path`` selects the dense physical route (full coupled ladder) or the
    effective GBZ-symbol route (needs the closed-form model; pass t_L/t_R
    explicitly or use a model recognized by ssh_params).  Per-L failures
    are recorded on the row and the scan continues.
    """
    if len(L_range) == 0:
        raise ValueError("L_range is empty")
    pars = ssh_params(model)
    if pars is not None:
        t_L, t_R = pars
    if path == "effective" and (t_L is None or t_R is None):
        raise ValueError(
            "the effective path needs the closed-form hoppings; pass t_L and t_R "
            "or use a nearest-neighbour model"
        )
    records: List[ScanRecord] = []
    for L in L_range:
        cut = resolve_cut(cut_rule, L)
        rec = ScanRecord(
            model=model.name, t_L=t_L, t_R=t_R, delta=float(delta), L=int(L),
            cut=cut_to_str(cut), source="dense_physical" if path == "dense" else "effective_gbz",
        )
        if t_L is not None and t_R is not None and delta > 0:
            try:
                rec.L_c_pred = scale_gbz(t_L, t_R, delta, L).L_c
            except ValueError:
                rec.L_c_pred = None
        try:
            if path == "dense":
                res, gap, min_r, rule = _dense_point(model, delta, L, cut, half_filling)
                rec.gap, rec.min_r, rec.fermi_rule = gap, min_r, rule
            elif path == "effective":
                corr = effective_corr_matrix(t_L, t_R, delta, L, cut)
                res = entanglement(corr)
                rec.fermi_rule = "Re E < 0"
            else:
                raise ValueError(f"unknown path '{path}'")
            rec.S, rec.S2, rec.im_residual = res.S, res.S2, res.im_residual
            rec.p_spectrum = res.p_spectrum
        except (ValueError, RuntimeError) as exc:
            rec.error = str(exc)
        records.append(rec)
    good = [(r.L, r.S) for r in records if r.S is not None]
    if not good:
        return records, None, None
    L_star, S_min = min(good, key=lambda t: t[1])
    return records, int(L_star), float(S_min)


def detect_dip(Ls: Sequence[int], Ss: Sequence[float],
               min_prominence: float = 0.5, max_S: float = -0.1):
    """Locate a genuine dip: a local minimum that is both deep and prominent.

    Prominence is min(max S before, max S after) - S at the minimum; this
    rejects flat negative curves (no prominence) and positive oscillations
    (no depth) alike.  Returns (L*, prominence) or (None, best prominence).
    """
    best_prom, best_L = 0.0, None
    for i in range(1, len(Ss) - 1):
        if Ss[i] is None:
            continue
        left = max((s for s in Ss[:i] if s is not None), default=None)
        right = max((s for s in Ss[i + 1:] if s is not None), default=None)
        if left is None or right is None:
            continue
        prom = min(left - Ss[i], right - Ss[i])
        if prom > best_prom and Ss[i] < max_S:
            best_prom, best_L = prom, Ls[i]
    if best_L is not None and best_prom >= min_prominence:
        return best_L, best_prom
    return None, best_prom


# ---------------------------------------------------------------------------
# parameter sweep
# ---------------------------------------------------------------------------

@dataclass
class SweepCell:
    t_ratio: float
    delta: float
    t_L: float
    t_R: float
    L_star: Optional[int]
    S_min: Optional[float]
    error: str = ""


def param_sweep(
    t_ratio_grid: Sequence[float],
    delta_grid: Sequence[float],
    L_range: Sequence[int],
    cut_rule="half",
    scale: float = 1.2,
    half_filling: bool = False,
) -> List[SweepCell]:
    """Dip depth over the (t_L/t_R, delta) plane at fixed hopping scale.

    Each ratio rho maps to t_L = scale*sqrt(rho), t_R = scale/sqrt(rho)
    (geometric mean pinned to ``scale``).  Cells run concurrently under
    the SIEC_THREADS budget; output order follows the input grids.
    """
    if len(t_ratio_grid) == 0 or len(delta_grid) == 0:
        raise ValueError("sweep grids must be nonempty")
    cells = [(float(r), float(d)) for r in t_ratio_grid for d in delta_grid]

    def run_cell(cell):
        ratio, delta = cell
        t_L = scale * np.sqrt(ratio)
        t_R = scale / np.sqrt(ratio)
        try:
            _, L_star, S_min = dip_scan(mdl.nh_ssh(t_L, t_R), delta, L_range, cut_rule,
                                        half_filling=half_filling)
            return SweepCell(ratio, delta, t_L, t_R, L_star, S_min)
        except (ValueError, RuntimeError) as exc:
            return SweepCell(ratio, delta, t_L, t_R, None, None, error=str(exc))

    with ThreadPoolExecutor(max_workers=thread_budget()) as pool:
        return list(pool.map(run_cell, cells))


# ---------------------------------------------------------------------------
# log-law baselines
# ---------------------------------------------------------------------------

def ring_entropy(model: mdl.BlochModel, L: int, cut: Tuple[int, int]) -> float:
    """Half-filled entanglement entropy on the periodic ring via the symbol.

    Uses the antiperiodic momentum grid k = (2m-1) pi / L, which is the
    exact half-filled ring projector for even L and never samples the
    gap-closing momenta of the critical models.
    """
    if L % 2:
        raise ValueError("ring entropy uses even L (antiperiodic grid)")
    ks = (2.0 * np.arange(1, L + 1) - 1.0) * np.pi / L
    kept = np.array([x for x in range(1, L + 1) if not (cut[0] <= x <= cut[1])])
    nk = len(kept)
    C = np.zeros((2 * nk, 2 * nk), dtype=complex)
    for k in ks:
        P = projector_symbol(model, float(k))
        ph = np.exp(1j * k * kept)
        C += np.kron(np.outer(ph, ph.conj()), P)
    C /= L
    corr = CorrelationMatrix(matrix=C, kept_sites=[(0, int(x), b) for x in kept for b in range(2)],
                                 cut=cut, source="effective_gbz")
    return entanglement(corr).S


def log_scaling_fit(
    model_name: str,
    L_range: Sequence[int],
    cut_rule="half",
    min_L: int = 12,
) -> Tuple[float, float, float, List[Tuple[int, float]]]:
    """Least-squares S ~ slope * ln L + intercept over even sizes.

    Sizes below ``min_L`` are excluded from the fit (lattice-scale
    corrections); returns (slope, intercept, R^2, [(L, S), ...]).
    """
    model = mdl.predefined(model_name)
    Ls = [L for L in L_range if L % 2 == 0]
    pts = []
    for L in Ls:
        cut = resolve_cut(cut_rule, L)
        pts.append((L, ring_entropy(model, L, cut)))
    fit_pts = [(L, S) for (L, S) in pts if L >= min_L]
    if len(fit_pts) < 4:
        raise ValueError(f"need at least 4 sizes >= {min_L} for the log fit, got {len(fit_pts)}")
    x = np.log([L for L, _ in fit_pts])
    y = np.array([S for _, S in fit_pts])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = np.sum((y - y.mean()) ** 2)
    r2 = 1.0 - float(np.sum(resid ** 2)) / float(ss_tot)
    return float(slope), float(intercept), float(r2), pts


# ---------------------------------------------------------------------------
# generalized models
# ---------------------------------------------------------------------------

@dataclass
class GeneralDipResult:
    records: List[ScanRecord]
    L_star: Optional[int]
    S_min: Optional[float]
    dip_L: Optional[int]
    prominence: float
    gbz_snapshots: Dict[int, np.ndarray] = field(default_factory=dict)
    gbz_median_abs: Dict[int, float] = field(default_factory=dict)


def general_model_dips(
    model_name: str,
    delta: float,
    L_range: Sequence[int],
    cut_rule="half",
    snapshot_L: Optional[Sequence[int]] = None,
) -> GeneralDipResult:
    """Dense dip scan for the generalized models plus numeric GBZ snapshots."""
    model = mdl.predefined(model_name)
    records, L_star, S_min = dip_scan(model, delta, L_range, cut_rule)
    Ls = [r.L for r in records]
    Ss = [r.S for r in records]
    dip_L, prom = detect_dip(Ls, Ss)
    result = GeneralDipResult(records=records, L_star=L_star, S_min=S_min,
                              dip_L=dip_L, prominence=prom)
    snaps = list(snapshot_L) if snapshot_L is not None else ([L_star] if L_star else [])
    for L in snaps:
        M = mdl.coupled_ladder(model, delta, L)
        energies = np.linalg.eigvals(M)
        zs = gbz_from_spectrum(model, energies)
        result.gbz_snapshots[int(L)] = zs
        finite = zs[np.isfinite(zs)]
        if len(finite):
            result.gbz_median_abs[int(L)] = float(np.median(np.abs(finite)))
    return result


# ---------------------------------------------------------------------------
# doubled system and the measurement identity
# ---------------------------------------------------------------------------

@dataclass
class DoubledSystem:
    base: np.ndarray
    eta: float
    matrix: np.ndarray


def build_doubled(base: np.ndarray, eta: float) -> DoubledSystem:
    """Two conjugate copies tied end-to-end with strength eta.

    The rung couples site 1 of the first block to site N of the second
    (and conjugate), so eta = 0 leaves the exact block spectrum
    spec(H) U conj(spec(H)).
    """
    if eta < 0:
        raise ValueError("eta must be >= 0")
    base = np.asarray(base, dtype=complex)
    N = base.shape[0]
    C = np.zeros((N, N), dtype=complex)
    C[0, N - 1] = eta
    C[N - 1, 0] = eta
    M = np.block([[base, C], [C.conj().T, base.conj().T]])
    return DoubledSystem(base=base, eta=float(eta), matrix=M)


def measurement_identity_check(doubled: DoubledSystem, A: np.ndarray):
    """Compare the pair-observable sum against twice the projected trace.

    lhs sums <Psi|A Lam|Psi> / <Psi|Lam|Psi> over doubled eigenstates with
    Re E < 0, where Lam selects the lower block and conjugates; rhs is
    2 Tr(A P) with P the occupied biorthogonal projector of the base
    system.  Returns (lhs, rhs, |lhs - rhs|).
    """
    N = doubled.base.shape[0]
    A = np.asarray(A, dtype=complex)
    if A.shape != (N, N):
        raise ValueError(f"operator must act on the base space, expected {(N, N)}, got {A.shape}")
    Ed, Vd = np.linalg.eig(doubled.matrix)
    lhs = 0.0 + 0.0j
    for i in np.where(Ed.real < 0)[0]:
        u = Vd[:N, i]
        v = Vd[N:, i]
        lam = v.conj() @ np.conj(u)
        if abs(lam) < 1e-12:
            raise ValueError(
                f"pair-operator expectation below 1e-12 for doubled state {i} "
                f"(E = {Ed[i]}); the ratio is ill-conditioned"
            )
        lhs += (v.conj() @ (A @ np.conj(u))) / lam
    es = spec.eig_biorthogonal(doubled.base)
    P = occupied_projector(es).matrix
    rhs = 2.0 * np.trace(A @ P)
    return complex(lhs), complex(rhs), float(abs(lhs - rhs))


def lambda_expectations(doubled: DoubledSystem):
    """Per-state <Lam> = v^dagger conj(u) for every doubled eigenstate."""
    N = doubled.base.shape[0]
    Ed, Vd = np.linalg.eig(doubled.matrix)
    vals = np.array([Vd[N:, i].conj() @ np.conj(Vd[:N, i]) for i in range(2 * N)])
    return Ed, vals, Vd

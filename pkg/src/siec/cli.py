"""Command-line entry point.

    siec <command> --config <file> [--out DIR] [--emit-spectra]

Commands: gbz, entropy, dip-scan, sweep, baselines, verify-measurement.
Exit status: 0 on success, 2 on config validation errors, 1 on
computation errors.
"""

from __future__ import annotations

import argparse
import sys
from typing import List, Optional

import numpy as np

from . import harness, io
from . import models as mdl
from .gbz import scale_gbz, ssh_params


def _model_params(cfg: io.RunConfig):
    model = mdl.predefined(cfg.model, cfg.t_L, cfg.t_R)
    return model, ssh_params(model)


def _emit_dense_spectra(cfg: io.RunConfig, model, Ls) -> None:
    for L in Ls:
        M = mdl.coupled_ladder(model, cfg.delta, L)
        io.write_spectra(cfg.output_dir, L, np.linalg.eigvals(M))


def _emit_pspectra(cfg: io.RunConfig, records) -> None:
    for rec in records:
        if rec.p_spectrum is not None and rec.cut:
            io.write_pspectrum(cfg.output_dir, rec.L, rec.p_spectrum)


# --- command handlers ---

def _cmd_gbz(cfg: io.RunConfig) -> int:
    model, pars = _model_params(cfg)
    if pars is None:
        print(f"the scale-dependent construction needs nearest-neighbour hoppings; "
              f"model '{cfg.model}' is not of that form", file=sys.stderr)
        return 1
    t_L, t_R = pars
    result = scale_gbz(t_L, t_R, cfg.delta, cfg.L)
    io.write_gbz(cfg.output_dir, result)
    io.write_meta(cfg, cfg.output_dir)
    if cfg.emit_spectra:
        _emit_dense_spectra(cfg, model, [cfg.L])
    print(f"gbz: L={cfg.L} regime={result.regime} alpha={result.alpha:.6g} "
          f"L_c={result.L_c:.6g} -> {cfg.output_dir}/gbz.csv")
    return 0


def _cmd_entropy(cfg: io.RunConfig) -> int:
    model, _ = _model_params(cfg)
    records, _, _ = harness.dip_scan(
        model, cfg.delta, [cfg.L], cfg.cut_rule, path=cfg.path,
        t_L=cfg.t_L, t_R=cfg.t_R, half_filling=cfg.half_filling,
    )
    rec = records[0]
    if rec.error:
        print(f"entropy failed at L={rec.L}: {rec.error}", file=sys.stderr)
        return 1
    rec.tag = io.config_tag(cfg)
    io.write_records(records, cfg.output_dir)
    io.write_meta(cfg, cfg.output_dir)
    if cfg.emit_spectra:
        _emit_pspectra(cfg, records)
        if cfg.path == "dense":
            _emit_dense_spectra(cfg, model, [cfg.L])
    if rec.im_residual is not None and rec.im_residual > 1e-6:
        print(f"warning: entanglement contributions carried imaginary parts up to "
              f"{rec.im_residual:.3g} (recorded as im_residual)", file=sys.stderr)
    print(f"entropy: L={rec.L} S={rec.S:.6g} S2={rec.S2:.6g} -> {cfg.output_dir}/records.csv")
    return 0


def _cmd_dip_scan(cfg: io.RunConfig) -> int:
    model, _ = _model_params(cfg)
    records, L_star, S_min = harness.dip_scan(
        model, cfg.delta, cfg.L_range, cfg.cut_rule, path=cfg.path,
        t_L=cfg.t_L, t_R=cfg.t_R, half_filling=cfg.half_filling,
    )
    tag = io.config_tag(cfg)
    for r in records:
        r.tag = tag
    io.write_records(records, cfg.output_dir)
    L_c_pred = next((r.L_c_pred for r in records if r.L_c_pred is not None), None)
    io.write_meta(cfg, cfg.output_dir,
                  extra={"L_star": L_star, "S_min": S_min, "L_c_pred": L_c_pred})
    if cfg.emit_spectra:
        _emit_pspectra(cfg, records)
        if cfg.path == "dense":
            _emit_dense_spectra(cfg, model, [r.L for r in records if not r.error])
    n_err = sum(1 for r in records if r.error)
    if L_star is None:
        print("dip-scan: no L evaluated successfully", file=sys.stderr)
        return 1
    msg = f"dip-scan: {len(records)} sizes, min S={S_min:.6g} at L={L_star}"
    if n_err:
        msg += f" ({n_err} failed, recorded)"
    n_imag = sum(1 for r in records if r.im_residual is not None and r.im_residual > 1e-6)
    if n_imag:
        print(f"warning: {n_imag} row(s) with im_residual > 1e-6 "
              f"(complex entanglement contributions; real part reported)", file=sys.stderr)
    print(msg + f" -> {cfg.output_dir}/records.csv")
    return 0


def _cmd_sweep(cfg: io.RunConfig) -> int:
    cells = harness.param_sweep(cfg.t_ratio_grid, cfg.delta_grid, cfg.L_range, cfg.cut_rule,
                                half_filling=cfg.half_filling)
    io.write_sweep(cells, cfg.output_dir)
    io.write_meta(cfg, cfg.output_dir)
    n_err = sum(1 for c in cells if c.error)
    print(f"sweep: {len(cells)} cells ({n_err} failed) -> {cfg.output_dir}/sweep.csv")
    return 0


def _cmd_baselines(cfg: io.RunConfig) -> int:
    fits = {}
    for name in cfg.models:
        slope, intercept, r2, pts = harness.log_scaling_fit(name, cfg.L_range, cfg.cut_rule)
        fits[name] = {"slope": slope, "intercept": intercept, "r2": r2,
                      "n_fit_points": sum(1 for L, _ in pts if L >= 12), "points": pts}
    io.write_baselines(fits, cfg.output_dir)
    io.write_meta(cfg, cfg.output_dir)
    for name, d in fits.items():
        print(f"baselines: {name} slope={d['slope']:+.4f} R2={d['r2']:.4f}")
    print(f"-> {cfg.output_dir}/baselines.csv")
    return 0


def _cmd_verify_measurement(cfg: io.RunConfig) -> int:
    model, _ = _model_params(cfg)
    L = cfg.L if cfg.L is not None else 10
    base = mdl.coupled_ladder(model, cfg.delta, L)
    doubled = harness.build_doubled(base, cfg.eta)
    rng = np.random.default_rng(cfg.seed)
    N = base.shape[0]
    worst = 0.0
    for _ in range(cfg.n_ops):
        A = rng.standard_normal((N, N))
        lhs, rhs, diff = harness.measurement_identity_check(doubled, A)
        rel = diff / max(1.0, abs(rhs))
        worst = max(worst, rel)
    Ed, lams, _ = harness.lambda_expectations(doubled)
    occ = Ed.real < 0
    report = {
        "L": L, "eta": cfg.eta, "n_ops": cfg.n_ops, "seed": cfg.seed,
        "max_rel_err": worst,
        "min_abs_lambda_occupied": float(np.min(np.abs(lams[occ]))),
        "ok": bool(worst < 1e-7),
    }
    io.write_measurement(report, cfg.output_dir)
    io.write_meta(cfg, cfg.output_dir)
    status = "ok" if report["ok"] else "FAILED"
    print(f"verify-measurement: max relative error {worst:.3e} over "
          f"{cfg.n_ops} operators ({status}) -> {cfg.output_dir}/measurement.json")
    return 0 if report["ok"] else 1


_HANDLERS = {
    "gbz": _cmd_gbz,
    "entropy": _cmd_entropy,
    "dip-scan": _cmd_dip_scan,
    "sweep": _cmd_sweep,
    "baselines": _cmd_baselines,
    "verify-measurement": _cmd_verify_measurement,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="siec",
        description="Scale-dependent boundary spectra, entanglement scans, and baselines.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in io.COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument("--out", default=None, help="output directory (overrides config)")
        p.add_argument("--emit-spectra", action="store_true",
                       help="also write spectra_L{n}.json files")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = io.load_config(args.config, args.command)
    except io.ConfigError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    if args.out is not None:
        cfg.output_dir = args.out
    if args.emit_spectra:
        cfg.emit_spectra = True
    try:
        return _HANDLERS[args.command](cfg)
    except (ValueError, RuntimeError, np.linalg.LinAlgError) as exc:
        print(f"computation error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

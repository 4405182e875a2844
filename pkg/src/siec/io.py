"""Run configuration, record serialization, and output-directory layout.

All numeric output uses 17 significant digits so float64 values survive a
CSV or JSON round trip exactly; complex values are split into re_/im_
column pairs (CSV) or [re, im] pairs (JSON).  Nothing here embeds wall
time by default, so rerunning the same config byte-identically reproduces
records.csv and meta.json.
"""

from __future__ import annotations

import csv
import hashlib
import json
import os
from dataclasses import dataclass, field, fields
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy

from .harness import ScanRecord
from .models import MODEL_NAMES

SCHEMA_VERSION = 1

COMMANDS = ("gbz", "entropy", "dip-scan", "sweep", "baselines", "verify-measurement")

BASELINE_MODELS = ("hermitian_ssh", "nhse_ssh_s11", "ep_model_s11")


class ConfigError(ValueError):
    """Carries every validation problem found in a run config."""

    def __init__(self, problems: List[str]):
        self.problems = list(problems)
        super().__init__("invalid config:\n" + "\n".join(f"  - {p}" for p in self.problems))


# ---------------------------------------------------------------------------
# run configuration
# ---------------------------------------------------------------------------

CutRule = Union[str, Tuple[int, int], None]


@dataclass
class RunConfig:
    command: str
    model: str = "nh_ssh"
    t_L: Optional[float] = None
    t_R: Optional[float] = None
    delta: float = 0.0
    L: Optional[int] = None
    L_range: Optional[List[int]] = None
    cut_rule: CutRule = "half"
    path: str = "dense"
    output_dir: str = "out"
    emit_spectra: bool = False
    eta: float = 1e-6
    n_ops: int = 20
    seed: int = 0
    t_ratio_grid: Optional[List[float]] = None
    delta_grid: Optional[List[float]] = None
    models: List[str] = field(default_factory=lambda: list(BASELINE_MODELS))
    half_filling: bool = False

    def echo(self) -> Dict[str, Any]:
        """Config as a plain JSON-safe dict (normalized defaults included)."""
        out: Dict[str, Any] = {}
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, tuple):
                v = list(v)
            out[f.name] = v
        return out


_ALLOWED_KEYS = {
    "command", "model", "t_L", "t_R", "delta", "L", "L_range", "cut_rule",
    "path", "output_dir", "emit_spectra", "eta", "n_ops", "seed",
    "t_ratio_grid", "delta_grid", "models", "half_filling",
}

_REQUIRED: Dict[str, Tuple[str, ...]] = {
    "gbz": ("L",),
    "entropy": ("L",),
    "dip-scan": ("L_range",),
    "sweep": ("L_range", "t_ratio_grid", "delta_grid"),
    "baselines": ("L_range",),
    "verify-measurement": (),
}


def _is_number(v: Any) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _check_cut_rule(raw: Any, problems: List[str]) -> CutRule:
    if raw is None or raw in ("half", "single_cell"):
        return raw
    if isinstance(raw, dict) and set(raw) == {"interval"}:
        raw = raw["interval"]
    if (isinstance(raw, (list, tuple)) and len(raw) == 2
            and all(isinstance(x, int) and not isinstance(x, bool) for x in raw)):
        a, b = raw
        if a > b:
            problems.append(f"cut interval [{a}, {b}] is empty")
            return None
        if a < 1:
            problems.append(f"cut interval must start at cell 1 or later, got [{a}, {b}]")
            return None
        return (a, b)
    problems.append(
        "cut_rule must be 'half', 'single_cell', null, or an interval [a, b] of integers"
    )
    return None


def validate_config(data: Dict[str, Any], command: str) -> RunConfig:
    """Normalize a raw config dict; raises ConfigError listing *all* problems."""
    problems: List[str] = []
    if command not in COMMANDS:
        raise ConfigError([f"unknown command '{command}'"])
    if not isinstance(data, dict):
        raise ConfigError(["config root must be a JSON object"])

    for k in sorted(set(data) - _ALLOWED_KEYS):
        problems.append(f"unknown config key '{k}'")

    cfg = RunConfig(command=command)

    if "command" in data and data["command"] != command:
        problems.append(
            f"config command '{data['command']}' does not match invoked command '{command}'"
        )

    if "model" in data:
        if data["model"] not in MODEL_NAMES:
            problems.append(
                f"unknown model '{data['model']}'; valid names: {', '.join(MODEL_NAMES)}"
            )
        else:
            cfg.model = data["model"]

    for key in ("t_L", "t_R"):
        if key in data:
            if not _is_number(data[key]) or data[key] <= 0:
                problems.append(f"{key} must be a positive number")
            else:
                setattr(cfg, key, float(data[key]))

    if "delta" in data:
        if not _is_number(data["delta"]):
            problems.append("delta must be a number")
        elif data["delta"] < 0:
            problems.append("delta must be >= 0")
        else:
            cfg.delta = float(data["delta"])

    if "L" in data:
        if not isinstance(data["L"], int) or isinstance(data["L"], bool) or data["L"] < 2:
            problems.append("L must be an integer >= 2")
        else:
            cfg.L = data["L"]

    if "L_range" in data:
        raw = data["L_range"]
        ok = (isinstance(raw, list) and len(raw) in (2, 3)
              and all(isinstance(x, int) and not isinstance(x, bool) for x in raw))
        if not ok:
            problems.append("L_range must be [start, stop] or [start, stop, step] with integers")
        else:
            start, stop = raw[0], raw[1]
            step = raw[2] if len(raw) == 3 else 1
            if step < 1:
                problems.append("L_range step must be >= 1")
            elif start > stop:
                problems.append(f"L_range [{start}, {stop}] is empty")
            else:
                cfg.L_range = list(range(start, stop + 1, step))

    if "cut_rule" in data:
        cfg.cut_rule = _check_cut_rule(data["cut_rule"], problems)

    if "path" in data:
        if data["path"] not in ("dense", "effective"):
            problems.append("path must be 'dense' or 'effective'")
        else:
            cfg.path = data["path"]

    if "output_dir" in data:
        if not isinstance(data["output_dir"], str) or not data["output_dir"]:
            problems.append("output_dir must be a nonempty string")
        else:
            cfg.output_dir = data["output_dir"]

    for key in ("emit_spectra", "half_filling"):
        if key in data:
            if not isinstance(data[key], bool):
                problems.append(f"{key} must be a boolean")
            else:
                setattr(cfg, key, data[key])

    if "eta" in data:
        if not _is_number(data["eta"]) or data["eta"] < 0:
            problems.append("eta must be a number >= 0")
        else:
            cfg.eta = float(data["eta"])

    if "n_ops" in data:
        if not isinstance(data["n_ops"], int) or isinstance(data["n_ops"], bool) or data["n_ops"] < 1:
            problems.append("n_ops must be an integer >= 1")
        else:
            cfg.n_ops = data["n_ops"]

    if "seed" in data:
        if not isinstance(data["seed"], int) or isinstance(data["seed"], bool):
            problems.append("seed must be an integer")
        else:
            cfg.seed = data["seed"]

    for key in ("t_ratio_grid", "delta_grid"):
        if key in data:
            raw = data[key]
            lo = 0.0 if key == "delta_grid" else None
            ok = isinstance(raw, list) and len(raw) > 0 and all(_is_number(x) for x in raw)
            if ok and lo is not None:
                ok = all(x >= lo for x in raw)
            if ok and lo is None:
                ok = all(x > 0 for x in raw)
            if not ok:
                bound = ">= 0" if key == "delta_grid" else "> 0"
                problems.append(f"{key} must be a nonempty list of numbers {bound}")
            else:
                setattr(cfg, key, [float(x) for x in raw])

    if "models" in data:
        raw = data["models"]
        if not isinstance(raw, list) or not raw or not all(isinstance(m, str) for m in raw):
            problems.append("models must be a nonempty list of model names")
        else:
            bad = [m for m in raw if m not in MODEL_NAMES]
            for m in bad:
                problems.append(f"unknown model '{m}'; valid names: {', '.join(MODEL_NAMES)}")
            if not bad:
                cfg.models = list(raw)

    for key in _REQUIRED[command]:
        if key not in data:
            problems.append(f"'{key}' is required for {command}")

    if command == "gbz" and "delta" in data and _is_number(data["delta"]) and data["delta"] <= 0:
        problems.append("gbz needs delta > 0 (the construction is scale-dependent)")

    if problems:
        raise ConfigError(problems)
    return cfg


def load_config(path: str, command: str) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError([f"cannot read config file: {exc}"])
    except json.JSONDecodeError as exc:
        raise ConfigError([f"config is not valid JSON: {exc}"])
    return validate_config(data, command)


def config_tag(cfg: RunConfig) -> str:
    """Determinism tag: sha256 of the canonical (sorted, compact) config JSON."""
    canon = json.dumps(cfg.echo(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


# ---------------------------------------------------------------------------
# serialization helpers
# ---------------------------------------------------------------------------

def fmt_number(v: Any) -> str:
    """17-significant-digit text for floats; empty cell for missing values."""
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return str(v)


def _parse_opt_float(s: str) -> Optional[float]:
    return None if s == "" else float(s)


RECORD_COLUMNS = [
    "model", "t_L", "t_R", "delta", "L", "cut", "source",
    "S", "S2", "gap", "min_r", "L_c_pred", "im_residual",
    "fermi_rule", "error", "timestamp", "tag",
]


def write_records(records: Sequence[ScanRecord], out_dir: str) -> str:
    """Write records.csv with fixed column order; returns the file path."""
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, "records.csv")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RECORD_COLUMNS)
        for r in records:
            w.writerow([fmt_number(getattr(r, c)) for c in RECORD_COLUMNS])
    return path


def read_records(path: str) -> List[ScanRecord]:
    """Inverse of write_records; empty cells come back as None."""
    out: List[ScanRecord] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rd = csv.DictReader(fh)
        if rd.fieldnames != RECORD_COLUMNS:
            raise ValueError(
                f"unexpected records.csv header {rd.fieldnames}; expected {RECORD_COLUMNS}"
            )
        for row in rd:
            out.append(ScanRecord(
                model=row["model"],
                t_L=_parse_opt_float(row["t_L"]),
                t_R=_parse_opt_float(row["t_R"]),
                delta=float(row["delta"]),
                L=int(row["L"]),
                cut=row["cut"],
                source=row["source"],
                S=_parse_opt_float(row["S"]),
                S2=_parse_opt_float(row["S2"]),
                gap=_parse_opt_float(row["gap"]),
                min_r=_parse_opt_float(row["min_r"]),
                L_c_pred=_parse_opt_float(row["L_c_pred"]),
                im_residual=_parse_opt_float(row["im_residual"]),
                fermi_rule=row["fermi_rule"],
                error=row["error"],
                timestamp=row["timestamp"],
                tag=row["tag"],
            ))
    return out


def _backend_identifiers() -> Dict[str, str]:
    info: Dict[str, str] = {"linalg": "numpy.linalg (LAPACK)"}
    try:
        cfg = np.show_config(mode="dicts")  # numpy >= 1.26
        blas = cfg.get("Build Dependencies", {}).get("blas", {})
        info["blas"] = str(blas.get("name", "unknown"))
    except TypeError:
        info["blas"] = "unknown"
    return info


def write_meta(cfg: RunConfig, out_dir: str, extra: Optional[Dict[str, Any]] = None) -> str:
    """meta.json: schema version, config echo, library versions, backend."""
    os.makedirs(out_dir, exist_ok=True)
    meta: Dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "command": cfg.command,
        "config": cfg.echo(),
        "tag": config_tag(cfg),
        "versions": {
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
        "backend": _backend_identifiers(),
    }
    if extra:
        meta.update(extra)
    path = os.path.join(out_dir, "meta.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def write_spectra(out_dir: str, L: int, energies: np.ndarray) -> str:
    """spectra_L{n}.json holding the eigenvalues as [re, im] pairs."""
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, f"spectra_L{int(L)}.json")
    pairs = [[float(f"{e.real:.17g}"), float(f"{e.imag:.17g}")] for e in energies]
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({"L": int(L), "energies": pairs}, fh)
        fh.write("\n")
    return path


def write_pspectrum(out_dir: str, L: int, p: np.ndarray) -> str:
    """pspectra_L{n}.json holding the truncated-projector eigenvalues as [re, im] pairs."""
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, f"pspectra_L{int(L)}.json")
    pairs = [[float(f"{v.real:.17g}"), float(f"{v.imag:.17g}")] for v in p]
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({"L": int(L), "p": pairs}, fh)
        fh.write("\n")
    return path


def write_gbz(out_dir: str, result) -> Tuple[str, str]:
    """gbz.csv (one momentum per row) plus gbz_meta.json sidecar."""
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, "gbz.csv")
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["m", "k", "re_z", "im_z", "abs_z", "regime"])
        for m, (k, z, _K) in enumerate(result.points, start=1):
            w.writerow([m, fmt_number(k), fmt_number(z.real), fmt_number(z.imag),
                        fmt_number(abs(z)), result.regime])
    side = {
        "L": result.L,
        "regime": result.regime,
        "alpha": float(f"{result.alpha:.17g}"),
        "L_prime": float(f"{result.L_prime:.17g}"),
        "L_c": float(f"{result.L_c:.17g}"),
        "K_c": [float(f"{result.K_c.real:.17g}"), float(f"{result.K_c.imag:.17g}")],
        "radius": float(f"{result.radius:.17g}"),
    }
    json_path = os.path.join(out_dir, "gbz_meta.json")
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump(side, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return csv_path, json_path


def write_sweep(cells, out_dir: str) -> str:
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, "sweep.csv")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t_ratio", "delta", "t_L", "t_R", "L_star", "S_min", "error"])
        for c in cells:
            w.writerow([fmt_number(c.t_ratio), fmt_number(c.delta), fmt_number(c.t_L),
                        fmt_number(c.t_R), fmt_number(c.L_star), fmt_number(c.S_min),
                        c.error])
    return path


def write_baselines(fits: Dict[str, Dict[str, Any]], out_dir: str) -> Tuple[str, str]:
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, "baselines.csv")
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["model", "L", "S"])
        for name in fits:
            for L, S in fits[name]["points"]:
                w.writerow([name, L, fmt_number(S)])
    json_path = os.path.join(out_dir, "baseline_fits.json")
    payload = {
        name: {k: v for k, v in d.items() if k != "points"} for name, d in fits.items()
    }
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return csv_path, json_path


def write_measurement(report: Dict[str, Any], out_dir: str) -> str:
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, "measurement.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path

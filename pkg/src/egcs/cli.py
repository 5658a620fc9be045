"""Command-line front end.

    egcs sweep --family egcs --n 2 --alpha-max 3 --grid 60
    egcs sweep --family noon --n 1..10
    egcs fit --n 0..10 --alpha-max 2,5,10
    egcs compare
    egcs generate --scheme pbs --alpha 1
    egcs verify-formulas

Exit codes: 0 ok, 2 bad configuration, 3 truncation inadequate, 4 degenerate fit.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .errors import AdequacyError, DegenerateFit
from .metrology import (
    FIT_MODELS,
    alpha_grid,
    fit_exponent,
    interpolate_delta_phi,
    mean_photon_number,
    printed_mean_photon_number,
    printed_normalization,
    printed_variance_formula,
    sweep,
    var_h,
)
from .optics import bs_scheme_pipeline, generate_egcs_n1
from .states import FAMILIES, egcs, egcs_normalization

EXIT_CONFIG, EXIT_ADEQUACY, EXIT_FIT = 2, 3, 4

SWEEP_COLUMNS = ["family", "n", "alpha", "N_bar", "var_H", "delta_phi", "dim_used", "shot_noise"]
FIT_COLUMNS = ["n", "alpha_max", "model", "x", "c", "rss", "points"]
COMPARE_COLUMNS = ["N_bar", "noon", "ecs", "egcs_1", "egcs_2", "shot_noise", "ordered"]
VERIFY_COLUMNS = ["quantity", "n", "alpha", "printed", "numerical", "abs_dev", "rel_dev"]


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    family: str = "egcs"
    n: list[int] = field(default_factory=lambda: [1])
    alpha_max: list[float] = field(default_factory=lambda: [3.0])
    grid_points: int = 60
    dim_override: int | None = None
    output_path: str | None = None
    format: str = "csv"
    model: str = "unit"
    scheme: str = "pbs"
    alpha: float = 1.0
    alphas: list[float] = field(default_factory=lambda: [0.0, 0.5, 1.0, 2.0])
    self_test: bool = False
    slack: float = 1e-6
    nbar_range: tuple[float, float] = (2.5, 6.0)

    def validate(self):
        if self.format not in ("csv", "json"):
            raise ConfigError(f"unknown format {self.format!r}")
        if self.command in ("sweep", "fit"):
            if self.grid_points < 1:
                raise ConfigError("empty grid: --grid must be >= 1")
            if any(a <= 0 for a in self.alpha_max) and self.family != "noon":
                raise ConfigError("--alpha-max must be > 0 for ECS/EGCS sweeps")
        if self.command == "sweep":
            if self.family not in FAMILIES:
                raise ConfigError(f"unknown family {self.family!r}")
            if self.family == "noon" and min(self.n) < 1:
                raise ConfigError("NOON needs n >= 1")
            if self.family == "ecs" and self.n != [0]:
                raise ConfigError("ECS has n = 0")
            if self.family != "noon" and len(self.n) != 1:
                raise ConfigError("ECS/EGCS sweeps take a single --n")
            if len(self.alpha_max) != 1:
                raise ConfigError("sweep takes a single --alpha-max")
        if self.command == "fit" and self.grid_points < 3 and not self.self_test:
            raise ConfigError("fit needs --grid >= 3")
        if self.command == "fit" and self.model not in FIT_MODELS:
            raise ConfigError(f"unknown fit model {self.model!r}")
        if self.dim_override is not None and self.dim_override < 1:
            raise ConfigError("--dim must be >= 1")
        lo, hi = self.nbar_range
        if self.command == "compare" and not 0 < lo < hi:
            raise ConfigError("--nbar-range needs 0 < lo < hi")


# --- formatting --------------------------------------------------------------

def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def render(rows: list[dict], columns: list[str], fmt_kind: str, meta: dict) -> str:
    if fmt_kind == "json":
        clean = [{k: _jsonable(r[k]) for k in columns} for r in rows]
        return json.dumps({**meta, "columns": columns, "records": clean}, indent=1, sort_keys=False) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([fmt(r[k]) for k in columns])
    return buf.getvalue()


def _jsonable(v):
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    return v


def emit(text: str, path: str | None):
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, newline="\n")


# --- commands ----------------------------------------------------------------

def sweep_rows(cfg: RunConfig) -> list[dict]:
    if cfg.family == "noon":
        records = sweep("noon", ns=cfg.n, dim=cfg.dim_override)
    else:
        records = sweep(cfg.family, n=cfg.n[0], alphas=alpha_grid(cfg.alpha_max[0], cfg.grid_points),
                        dim=cfg.dim_override)
    rows = [{
        "family": r.family, "n": r.n, "alpha": r.alpha, "N_bar": r.n_bar, "var_H": r.var_h,
        "delta_phi": r.delta_phi, "dim_used": r.dim, "shot_noise": 1.0 / math.sqrt(r.n_bar),
    } for r in records]
    return sorted(rows, key=lambda r: (r["n"], r["alpha"]))


def cmd_sweep(cfg: RunConfig) -> str:
    return render(sweep_rows(cfg), SWEEP_COLUMNS, cfg.format, {"command": "sweep"})


def _synthetic_fit(cfg: RunConfig) -> list[dict]:
    x0 = 1.06
    c0 = 1.0 if cfg.model == "unit" else 0.75
    n_bar = np.geomspace(0.5, 50.0, max(cfg.grid_points, 3))
    res = fit_exponent(n_bar=n_bar, delta_phi=c0 * n_bar ** -x0, model=cfg.model)
    ok = abs(res.x - x0) <= 1e-9 and abs(res.c - c0) <= 1e-9
    if not ok:
        raise DegenerateFit(f"self-test failed: recovered x={res.x!r}, c={res.c!r}")
    return [{"n": -1, "alpha_max": math.nan, "model": res.model, "x": res.x, "c": res.c,
             "rss": res.rss, "points": n_bar.size}]


def fit_rows(cfg: RunConfig) -> list[dict]:
    if cfg.self_test:
        return _synthetic_fit(cfg)
    rows = []
    for amax in cfg.alpha_max:
        grid = alpha_grid(amax, cfg.grid_points)
        for n in cfg.n:
            records = sweep("egcs" if n else "ecs", n=n, alphas=grid, dim=cfg.dim_override)
            res = fit_exponent(records, model=cfg.model)
            rows.append({"n": n, "alpha_max": float(amax), "model": res.model, "x": res.x,
                         "c": res.c, "rss": res.rss, "points": len(records)})
    return sorted(rows, key=lambda r: (r["n"], r["alpha_max"]))


def cmd_fit(cfg: RunConfig) -> str:
    return render(fit_rows(cfg), FIT_COLUMNS, cfg.format, {"command": "fit"})


def compare_rows(cfg: RunConfig) -> list[dict]:
    """Delta-phi of NOON, ECS, EGCS(1), EGCS(2) interpolated onto a common N-bar grid."""
    lo, hi = cfg.nbar_range
    amax = cfg.alpha_max[0]
    grid = alpha_grid(amax, cfg.grid_points)
    curves = {
        "noon": sweep("noon", ns=range(1, math.ceil(hi) + 2)),
        "ecs": sweep("ecs", alphas=grid),
        "egcs_1": sweep("egcs", n=1, alphas=grid),
        "egcs_2": sweep("egcs", n=2, alphas=grid),
    }
    q = np.linspace(lo, hi, cfg.grid_points)
    vals = {k: interpolate_delta_phi(v, q) for k, v in curves.items()}
    rows = []
    for i, nb in enumerate(q):
        e2, e1, ec, no = vals["egcs_2"][i], vals["egcs_1"][i], vals["ecs"][i], vals["noon"][i]
        ordered = e2 <= e1 + cfg.slack and e1 <= ec + cfg.slack and ec <= no + cfg.slack
        rows.append({"N_bar": nb, "noon": no, "ecs": ec, "egcs_1": e1, "egcs_2": e2,
                     "shot_noise": 1.0 / math.sqrt(nb), "ordered": bool(ordered)})
    return rows


def cmd_compare(cfg: RunConfig) -> str:
    rows = compare_rows(cfg)
    meta = {"command": "compare", "ordering_holds": all(r["ordered"] for r in rows)}
    return render(rows, COMPARE_COLUMNS, cfg.format, meta)


def _deviation_row(quantity, n, alpha, printed, numerical):
    dev = abs(printed - numerical)
    rel = dev / abs(numerical) if numerical != 0 else (0.0 if dev == 0 else math.inf)
    return {"quantity": quantity, "n": n, "alpha": alpha, "printed": printed, "numerical": numerical,
            "abs_dev": dev, "rel_dev": rel}


def verify_rows(cfg: RunConfig) -> list[dict]:
    """Printed closed forms for normalization, N-bar and Var(H) against numerics."""
    rows = []
    for n in cfg.n:
        for a in cfg.alphas:
            a = float(a)
            psi = egcs(n, a, cfg.dim_override)
            rows.append(_deviation_row("normalization", n, a, printed_normalization(n, a),
                                       egcs_normalization(n, a, cfg.dim_override)))
            rows.append(_deviation_row("mean_photon_number", n, a, printed_mean_photon_number(n, a),
                                       mean_photon_number(psi)))
            rows.append(_deviation_row("variance_h", n, a, printed_variance_formula(n, a), var_h(psi)))
    return sorted(rows, key=lambda r: (r["n"], r["alpha"]))


def cmd_verify_formulas(cfg: RunConfig) -> str:
    return render(verify_rows(cfg), VERIFY_COLUMNS, cfg.format, {"command": "verify-formulas"})


def cmd_generate(cfg: RunConfig) -> str:
    if cfg.scheme == "pbs":
        rep = generate_egcs_n1(cfg.alpha, cfg.dim_override, n=cfg.n[0] if cfg.n else 1)
    elif cfg.scheme in ("beam-splitter", "bs-appendix"):
        rep = bs_scheme_pipeline(cfg.alpha, cfg.dim_override)
    else:
        raise ConfigError(f"unknown scheme {cfg.scheme!r}")
    return json.dumps(rep.to_dict(), indent=1) + "\n"


COMMANDS = {
    "sweep": cmd_sweep,
    "fit": cmd_fit,
    "compare": cmd_compare,
    "generate": cmd_generate,
    "verify-formulas": cmd_verify_formulas,
}


# --- argument parsing --------------------------------------------------------

def parse_int_range(text: str) -> list[int]:
    """'3' -> [3]; '1..4' -> [1, 2, 3, 4]; '0,2,5' -> [0, 2, 5]."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..", 1)
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    if not out:
        raise argparse.ArgumentTypeError(f"empty integer range {text!r}")
    return out


def parse_floats(text: str) -> list[float]:
    try:
        vals = [float(p) for p in text.split(",") if p.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    if not vals:
        raise argparse.ArgumentTypeError(f"empty list {text!r}")
    return vals


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="egcs", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, default_n):
        sp.add_argument("--n", type=parse_int_range,
                        default=None if default_n is None else parse_int_range(default_n))
        sp.add_argument("--dim", dest="dim_override", type=int, default=None)
        sp.add_argument("--output", "-o", dest="output_path", default=None)
        sp.add_argument("--format", choices=["csv", "json"], default="csv")

    sp = sub.add_parser("sweep", help="Delta-phi and N-bar along one probe family")
    sp.add_argument("--family", type=str.lower, default="egcs")
    sp.add_argument("--alpha-max", type=parse_floats, default=[3.0])
    sp.add_argument("--grid", dest="grid_points", type=int, default=60)
    common(sp, None)

    sp = sub.add_parser("fit", help="fitted exponent x of Delta-phi ~ N-bar^-x per (n, alpha_max)")
    sp.add_argument("--alpha-max", type=parse_floats, default=[5.0])
    sp.add_argument("--grid", dest="grid_points", type=int, default=60)
    sp.add_argument("--model", choices=FIT_MODELS, default="unit")
    sp.add_argument("--self-test", action="store_true")
    common(sp, "0..10")

    sp = sub.add_parser("compare", help="NOON/ECS/EGCS Delta-phi at common N-bar")
    sp.add_argument("--alpha-max", type=parse_floats, default=[3.0])
    sp.add_argument("--grid", dest="grid_points", type=int, default=60)
    sp.add_argument("--nbar-range", type=parse_floats, default=[2.5, 6.0])
    sp.add_argument("--slack", type=float, default=1e-6)
    common(sp, "1")

    sp = sub.add_parser("generate", help="simulate an EGCS generation scheme (JSON report)")
    sp.add_argument("--scheme", choices=["pbs", "beam-splitter", "bs-appendix"], default="pbs")
    sp.add_argument("--alpha", type=float, default=1.0)
    common(sp, "1")

    sp = sub.add_parser("verify-formulas", help="printed closed forms vs numerical values")
    sp.add_argument("--alphas", type=parse_floats, default=[0.0, 0.5, 1.0, 2.0])
    common(sp, "0..3")
    return p


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    kw = {k: v for k, v in vars(ns).items() if k in RunConfig.__dataclass_fields__}
    if kw.get("n") is None:
        kw["n"] = {"noon": list(range(1, 11)), "ecs": [0]}.get(kw.get("family"), [1])
    if "nbar_range" in kw:
        if len(kw["nbar_range"]) != 2:
            raise ConfigError("--nbar-range takes two values lo,hi")
        kw["nbar_range"] = tuple(kw["nbar_range"])
    return RunConfig(**kw)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = config_from_args(ns)
        cfg.validate()
    except ConfigError as exc:
        print(f"egcs {ns.command}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        text = COMMANDS[cfg.command](cfg)
    except ConfigError as exc:
        print(f"egcs {ns.command}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except AdequacyError as exc:
        print(f"egcs {ns.command}: {exc}", file=sys.stderr)
        return EXIT_ADEQUACY
    except DegenerateFit as exc:
        print(f"egcs {ns.command}: {exc}", file=sys.stderr)
        return EXIT_FIT
    emit(text, cfg.output_path)
    return 0


if __name__ == "__main__":
    sys.exit(main())

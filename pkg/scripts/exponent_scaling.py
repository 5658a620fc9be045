"""Fitted exponent x of Delta-phi ~ 1/N^x against the Fock index n.

For each alpha_max, EGCS sweeps for n = 0..n_max are fitted in log space.
Both the prefactor-free model and the free-prefactor power law are reported.

    python scripts/exponent_scaling.py --alpha-max 5,20 --out exponents.csv
"""
import argparse
import csv
import time
from dataclasses import dataclass, field

from egcs.metrology import FIT_MODELS, alpha_grid, fit_exponent, sweep


@dataclass
class Config:
    alpha_max: list = field(default_factory=lambda: [5.0, 20.0])
    n_max: int = 10
    points: int = 60
    out: str = "exponents.csv"


def run(cfg: Config):
    rows = []
    for amax in cfg.alpha_max:
        grid = alpha_grid(amax, cfg.points)
        for n in range(cfg.n_max + 1):
            recs = sweep("egcs" if n else "ecs", n=n, alphas=grid)
            for model in FIT_MODELS:
                res = fit_exponent(recs, model=model)
                rows.append({"alpha_max": amax, "n": n, "model": model, "x": res.x, "c": res.c, "rss": res.rss})
    return rows


def main():
    p = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    p.add_argument("--alpha-max", type=lambda s: [float(v) for v in s.split(",")], default=[5.0, 20.0])
    p.add_argument("--n-max", type=int, default=10)
    p.add_argument("--points", type=int, default=60)
    p.add_argument("--out", default="exponents.csv")
    cfg = Config(**vars(p.parse_args()))
    t0 = time.perf_counter()
    rows = run(cfg)
    with open(cfg.out, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    print(f"wrote {cfg.out} ({time.perf_counter() - t0:.1f} s)")
    for amax in cfg.alpha_max:
        for model in FIT_MODELS:
            xs = [r["x"] for r in rows if r["alpha_max"] == amax and r["model"] == model]
            print(f"alpha_max={amax:g} {model:>5}: " + " ".join(f"{x:.3f}" for x in xs))


if __name__ == "__main__":
    main()

"""Phase-sensitivity bounds, probe sweeps and power-law exponent fits."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DegenerateFit, NotNormalized, ZeroInformation
from .fock import (
    MultiModeState,
    OperatorMatrix,
    check_adequacy,
    expectation,
    number_operator_two_mode,
    required_dim,
    variance,
)
from .states import ProbeFamily, egcs

NORM_TOL = 1e-9


def phase_generator(dim: int | tuple[int, int]) -> OperatorMatrix:
    """H = (a^dag a (x) 1 - 1 (x) b^dag b) / 2, stored diagonally."""
    d1, d2 = (dim, dim) if np.isscalar(dim) else dim
    n1, n2 = np.meshgrid(np.arange(d1), np.arange(d2), indexing="ij")
    return OperatorMatrix(0.5 * (n1 - n2), ("1", "2"), diagonal=True)


def _check_normalized(psi: MultiModeState):
    if abs(psi.norm - 1.0) > NORM_TOL:
        raise NotNormalized(f"state norm {psi.norm!r} differs from 1 by more than {NORM_TOL}")


def var_h(psi: MultiModeState) -> float:
    _check_normalized(psi)
    return max(variance(phase_generator(psi.dims), psi), 0.0)


def qfi(psi: MultiModeState, t: float = 1.0) -> float:
    """Pure-state quantum Fisher information 4 t^2 <Delta^2 H>."""
    return 4.0 * t * t * var_h(psi)


def min_phase_uncertainty(psi: MultiModeState, trials: int = 1, t: float = 1.0) -> float:
    """Cramer-Rao bound 1 / sqrt(trials * QFI)."""
    f = qfi(psi, t)
    if f <= 0.0:
        raise ZeroInformation("QFI is zero; the probe cannot resolve the phase")
    return 1.0 / math.sqrt(trials * f)


def mean_photon_number(psi: MultiModeState) -> float:
    return expectation(number_operator_two_mode(psi.dims), psi).real


# --- closed forms as printed in the source --------------------------------
# These are evaluated literally for the formula audit and are never used to
# build states.

def _printed_overlap(n: int, alpha: float) -> float:
    return alpha ** n * math.exp(-abs(alpha) ** 2 / 2) / math.factorial(n)


def printed_normalization(n: int, alpha: float) -> float:
    return 1.0 / math.sqrt(2.0 * (1.0 + _printed_overlap(n, alpha)))


def printed_mean_photon_number(n: int, alpha: float) -> float:
    return (n + abs(alpha) ** 2) / math.sqrt(2.0 * (1.0 + _printed_overlap(n, alpha)))


def printed_variance_formula(n: int, alpha: float) -> float:
    x = abs(alpha) ** 2
    return (n * n + x * x + (4 * n + 1) * x) / (4.0 * (1.0 + _printed_overlap(n, alpha)))


# --- sweeps ----------------------------------------------------------------

@dataclass(frozen=True)
class SweepRecord:
    family: str
    n: int
    alpha: float
    n_bar: float
    var_h: float
    delta_phi: float
    dim: int

    def as_dict(self) -> dict:
        return asdict(self)


def evaluate(family: ProbeFamily, dim: int | None = None) -> SweepRecord:
    dim = required_dim(family.n, family.alpha) if dim is None else dim
    check_adequacy(family.n, family.alpha, dim)
    psi = egcs(family.n, family.alpha, dim)
    v = var_h(psi)
    return SweepRecord(
        family=family.kind,
        n=family.n,
        alpha=float(abs(family.alpha)),
        n_bar=mean_photon_number(psi),
        var_h=v,
        delta_phi=1.0 / (2.0 * math.sqrt(v)) if v > 0 else math.inf,
        dim=dim,
    )


def alpha_grid(alpha_max: float, points: int = 60, start: float = 0.05) -> np.ndarray:
    """Uniform grid in |alpha| over [start, alpha_max]; alpha = 0 is excluded."""
    if points < 1 or alpha_max < start:
        raise ValueError(f"empty alpha grid (points={points}, alpha_max={alpha_max})")
    return np.linspace(start, alpha_max, points)


def sweep(kind: str, *, n: int = 0, alphas: Iterable[float] | None = None,
          ns: Iterable[int] | None = None, dim: int | None = None) -> list[SweepRecord]:
    """One record per grid point; NOON sweeps take ``ns``, ECS/EGCS take ``alphas``."""
    kind = kind.lower()
    if kind == "noon":
        grid = sorted(int(k) for k in (ns if ns is not None else [n]))
        if not grid:
            raise ValueError("empty n grid")
        points = [ProbeFamily("noon", k) for k in grid]
    else:
        grid = sorted(float(a) for a in (alphas if alphas is not None else []))
        if not grid:
            raise ValueError("empty alpha grid")
        if kind == "ecs" and n != 0:
            raise ValueError("ECS sweeps have n == 0")
        points = [ProbeFamily(kind, n, a) for a in grid]
    return [evaluate(p, dim) for p in points]


def interpolate_delta_phi(records: Sequence[SweepRecord], n_bar: Sequence[float]) -> np.ndarray:
    """Piecewise-linear Delta-phi at the requested mean photon numbers.

    Raises if a requested point lies outside the sweep's N-bar range.
    """
    nb = np.array([r.n_bar for r in records])
    dp = np.array([r.delta_phi for r in records])
    order = np.argsort(nb)
    nb, dp = nb[order], dp[order]
    if np.any(np.diff(nb) <= 0):
        raise ValueError("N-bar is not strictly monotone along the sweep")
    q = np.asarray(n_bar, dtype=float)
    eps = 1e-9 * max(1.0, abs(nb[-1]))
    if q.min() < nb[0] - eps or q.max() > nb[-1] + eps:
        raise ValueError(f"requested N-bar range [{q.min()}, {q.max()}] outside [{nb[0]}, {nb[-1]}]")
    return np.interp(q, nb, dp)


# --- exponent fit ------------------------------------------------------------

FIT_MODELS = ("unit", "power")


@dataclass(frozen=True)
class FitResult:
    x: float
    c: float
    rss: float
    n: int | None = None
    alpha_max: float | None = None
    model: str = "power"


def fit_exponent(records: Sequence[SweepRecord] | None = None, *, n_bar=None, delta_phi=None,
                 model: str = "power") -> FitResult:
    """Fit Delta-phi against N-bar in log-log space.

    ``model="power"``: ordinary least squares for log dphi = log c - x log N,
    both slope and intercept free.

    ``model="unit"``: the prefactor is pinned to 1, i.e. dphi = 1 / N^x, and
    only x is fitted (least squares through the origin in log space).

    ``rss`` is the residual sum of squares of log dphi.
    """
    if model not in FIT_MODELS:
        raise ValueError(f"unknown fit model {model!r}")
    n_fam = alpha_max = None
    if records is not None:
        n_bar = [r.n_bar for r in records]
        delta_phi = [r.delta_phi for r in records]
        ns = {r.n for r in records}
        n_fam = ns.pop() if len(ns) == 1 else None
        alpha_max = max(r.alpha for r in records)
    nb = np.asarray(n_bar, dtype=float)
    dp = np.asarray(delta_phi, dtype=float)
    if nb.size < 3 or nb.size != dp.size:
        raise DegenerateFit(f"need >= 3 paired points, got {nb.size} and {dp.size}")
    if not (np.all(np.isfinite(nb) & (nb > 0)) and np.all(np.isfinite(dp) & (dp > 0))):
        raise DegenerateFit("N-bar and Delta-phi must be positive and finite")
    lx, ly = np.log(nb), np.log(dp)
    if np.ptp(lx) == 0:
        raise DegenerateFit("all N-bar values are equal")
    if model == "power":
        mx, my = lx.mean(), ly.mean()
        slope = np.sum((lx - mx) * (ly - my)) / np.sum((lx - mx) ** 2)
        intercept = my - slope * mx
    else:
        slope = np.sum(lx * ly) / np.sum(lx * lx)
        intercept = 0.0
    resid = ly - (intercept + slope * lx)
    return FitResult(x=float(-slope), c=float(math.exp(intercept)), rss=float(resid @ resid),
                     n=n_fam, alpha_max=alpha_max, model=model)

"""NOON, entangled coherent (ECS) and entangled generalized coherent (EGCS) probes.

All three are members of one family,

    |psi> ∝ |0>_1 |n, alpha>_2 + |n, alpha>_1 |0>_2 ,

with ECS at n = 0 and NOON at alpha = 0. Normalization is always taken from
the constructed amplitudes.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fock import (
    MultiModeState,
    displaced_number_state,
    fock_state,
    normalize,
    required_dim,
)

FAMILIES = ("noon", "ecs", "egcs")


@dataclass(frozen=True)
class ProbeFamily:
    kind: str
    n: int = 0
    alpha: complex = 0.0

    def __post_init__(self):
        kind = self.kind.lower()
        if kind not in FAMILIES:
            raise ValueError(f"unknown probe family {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        if self.n < 0:
            raise ValueError("n must be >= 0")
        if kind == "noon" and (self.alpha != 0 or self.n < 1):
            raise ValueError("NOON needs alpha == 0 and n >= 1")
        if kind == "ecs" and self.n != 0:
            raise ValueError("ECS needs n == 0")

    def state(self, dim: int | None = None) -> MultiModeState:
        return egcs(self.n, self.alpha, dim)


def egcs_unnormalized(n: int, alpha: complex, dim: int | None = None) -> MultiModeState:
    """|0>|n,alpha> + |n,alpha>|0> without any normalization factor."""
    dim = required_dim(n, alpha) if dim is None else dim
    v = displaced_number_state(n, alpha, dim).amplitudes
    vac = fock_state(0, dim).amplitudes
    amps = np.multiply.outer(vac, v) + np.multiply.outer(v, vac)
    return MultiModeState(amps, ("1", "2"))


def egcs_normalization(n: int, alpha: complex, dim: int | None = None) -> float:
    """Numerical normalization factor 1/|| |0>|n,a> + |n,a>|0> ||."""
    return 1.0 / egcs_unnormalized(n, alpha, dim).norm


def egcs(n: int, alpha: complex, dim: int | None = None) -> MultiModeState:
    psi, _ = normalize(egcs_unnormalized(n, alpha, dim))
    return psi


def ecs(alpha: complex, dim: int | None = None) -> MultiModeState:
    return egcs(0, alpha, dim)


def noon(n: int, dim: int | None = None) -> MultiModeState:
    if n < 1:
        raise ValueError("NOON needs n >= 1")
    return egcs(n, 0.0, dim)


def apply_phase(psi: MultiModeState, phi: float) -> MultiModeState:
    """Evolve under exp(-i phi (a^dag a - b^dag b)/2).

    Diagonal in the Fock basis: |n1, n2> picks up exp(-i phi (n1 - n2) / 2).
    """
    if len(psi.dims) != 2:
        raise ValueError("apply_phase expects a two-mode state")
    n1 = np.arange(psi.dims[0])[:, None]
    n2 = np.arange(psi.dims[1])[None, :]
    return MultiModeState(psi.amplitudes * np.exp(-0.5j * phi * (n1 - n2)), psi.labels)


def phase_encoded_rotated_alpha(n: int, alpha: complex, phi: float, dim: int | None = None,
                                core_phase: bool = False) -> MultiModeState:
    """Phase-encoded EGCS written with rotated displacements only.

    Branch 1 is |n, alpha e^{-i phi/2}>_1 |0>_2 and branch 2 is
    |0>_1 |n, alpha e^{+i phi/2}>_2. Exact evolution additionally multiplies
    the branches by e^{-i n phi/2} and e^{+i n phi/2}; pass
    ``core_phase=True`` to include that factor.
    """
    dim = required_dim(n, alpha) if dim is None else dim
    v1 = displaced_number_state(n, alpha * np.exp(-0.5j * phi), dim).amplitudes
    v2 = displaced_number_state(n, alpha * np.exp(0.5j * phi), dim).amplitudes
    vac = fock_state(0, dim).amplitudes
    w1, w2 = (np.exp(-0.5j * n * phi), np.exp(0.5j * n * phi)) if core_phase else (1.0, 1.0)
    amps = w1 * np.multiply.outer(v1, vac) + w2 * np.multiply.outer(vac, v2)
    out, _ = normalize(MultiModeState(amps, ("1", "2")))
    return out

"""Truncated Fock-space linear algebra.

States are stored as dense complex numpy arrays. A single mode is a
:class:`StateVector`; several modes are a :class:`MultiModeState` whose
amplitude tensor has one axis per mode (axes may have different cutoffs).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.linalg import expm
from scipy.special import eval_genlaguerre, gammaln

from .errors import AdequacyError, DimensionMismatch, ModeMismatch, ZeroNorm

SAFE_BUFFER_FRACTION = 0.1


def required_dim(n: int, alpha: complex = 0.0) -> int:
    """Smallest cutoff for which D(alpha)|n> leaks < ~1e-12 past the top index.

    The photon-number distribution of D(alpha)|n> has mean n + |alpha|^2 and
    variance (2n + 1)|alpha|^2; the cutoff sits eight deviations above the mean
    plus a fixed margin.
    """
    x = abs(alpha) ** 2
    return math.ceil(n + x + 8.0 * math.sqrt((2 * n + 1) * x + n + 1) + 20)


def check_adequacy(n: int, alpha: complex, dim: int) -> None:
    need = n + 1 if alpha == 0 else required_dim(n, alpha)
    if dim < need:
        raise AdequacyError(
            f"dim={dim} too small for n={n}, |alpha|={abs(alpha):.6g}; need dim >= {need}"
        )


def safe_block(alpha: complex, dim: int) -> int:
    """Number of leading basis indices on which a truncated D(alpha) is trustworthy.

    An index i is safe when D(alpha)|i> fits inside the cutoff by the adequacy
    rule; the top 10% of indices are always excluded.
    """
    cap = dim - math.ceil(SAFE_BUFFER_FRACTION * dim)
    k = 0
    while k < cap and required_dim(k, alpha) <= dim:
        k += 1
    return k


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=np.complex128)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class StateVector:
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = _frozen(self.amplitudes)
        if amps.ndim != 1 or amps.size < 1:
            raise DimensionMismatch("StateVector needs a nonempty 1-d amplitude array")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def padded(self, dim: int) -> "StateVector":
        if dim < self.dim:
            raise DimensionMismatch(f"cannot pad dim {self.dim} down to {dim}")
        out = np.zeros(dim, dtype=complex)
        out[: self.dim] = self.amplitudes
        return StateVector(out)


@dataclass(frozen=True)
class MultiModeState:
    """Amplitude tensor over labelled modes; axis k belongs to ``labels[k]``."""

    amplitudes: np.ndarray
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        amps = _frozen(self.amplitudes)
        labels = tuple(str(l) for l in self.labels) or tuple(str(k + 1) for k in range(amps.ndim))
        if len(labels) != amps.ndim:
            raise ModeMismatch(f"{len(labels)} labels for a rank-{amps.ndim} tensor")
        if len(set(labels)) != len(labels):
            raise ModeMismatch(f"duplicate mode labels {labels}")
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "labels", labels)

    @property
    def dims(self) -> tuple[int, ...]:
        return self.amplitudes.shape

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def axis(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise ModeMismatch(f"no mode {label!r} in {self.labels}") from None

    def reordered(self, labels: Sequence[str]) -> "MultiModeState":
        if sorted(labels) != sorted(self.labels):
            raise ModeMismatch(f"{tuple(labels)} is not a permutation of {self.labels}")
        order = [self.axis(l) for l in labels]
        return MultiModeState(np.transpose(self.amplitudes, order), tuple(labels))

    def relabeled(self, mapping: dict[str, str]) -> "MultiModeState":
        return MultiModeState(self.amplitudes, tuple(mapping.get(l, l) for l in self.labels))

    def padded(self, dims: Sequence[int]) -> "MultiModeState":
        dims = tuple(dims)
        if len(dims) != len(self.dims) or any(d < s for d, s in zip(dims, self.dims)):
            raise DimensionMismatch(f"cannot pad {self.dims} to {dims}")
        out = np.zeros(dims, dtype=complex)
        out[tuple(slice(0, s) for s in self.dims)] = self.amplitudes
        return MultiModeState(out, self.labels)


@dataclass(frozen=True)
class OperatorMatrix:
    """Dense operator, or a diagonal one stored as a tensor of eigenvalues.

    ``modes`` names the tensor factors the operator acts on. Diagonal
    operators keep ``entries`` shaped like the state tensor they act on.
    """

    entries: np.ndarray
    modes: tuple[str, ...] = ("1",)
    diagonal: bool = False

    def __post_init__(self):
        object.__setattr__(self, "entries", _frozen(self.entries))
        object.__setattr__(self, "modes", tuple(self.modes))

    @property
    def shape(self):
        return self.entries.shape

    def dense(self) -> np.ndarray:
        if self.diagonal:
            return np.diag(self.entries.ravel())
        return np.asarray(self.entries)

    def __matmul__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        if self.diagonal and other.diagonal:
            return OperatorMatrix(self.entries * other.entries, self.modes, True)
        return OperatorMatrix(self.dense() @ other.dense(), self.modes)

    @property
    def H(self) -> "OperatorMatrix":
        return OperatorMatrix(np.conj(self.entries) if self.diagonal else self.dense().conj().T,
                              self.modes, self.diagonal)


# --- single-mode operators -------------------------------------------------

def annihilation(dim: int) -> OperatorMatrix:
    if dim < 1:
        raise DimensionMismatch("dim must be >= 1")
    return OperatorMatrix(np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1))


def creation(dim: int) -> OperatorMatrix:
    return annihilation(dim).H


def number_operator(dim: int) -> OperatorMatrix:
    return OperatorMatrix(np.arange(dim, dtype=float), diagonal=True)


def number_operator_two_mode(dim: int | tuple[int, int]) -> OperatorMatrix:
    """N = a^dag a (x) 1 + 1 (x) b^dag b, stored diagonally."""
    d1, d2 = (dim, dim) if np.isscalar(dim) else dim
    n1, n2 = np.meshgrid(np.arange(d1), np.arange(d2), indexing="ij")
    return OperatorMatrix((n1 + n2).astype(float), ("1", "2"), diagonal=True)


def displacement_elements(alpha: complex, rows, cols) -> np.ndarray:
    """<m|D(alpha)|n> from the associated-Laguerre closed form.

    ``rows`` and ``cols`` broadcast against each other. Magnitudes are built in
    log space so large |alpha| and high indices do not overflow the prefactor.
    """
    m, n = np.broadcast_arrays(np.asarray(rows, dtype=np.int64), np.asarray(cols, dtype=np.int64))
    alpha = complex(alpha)
    if alpha == 0:
        return (m == n).astype(complex)
    x = abs(alpha) ** 2
    lo = np.minimum(m, n)
    hi = np.maximum(m, n)
    k = hi - lo
    log_mag = 0.5 * (gammaln(lo + 1) - gammaln(hi + 1)) + k * math.log(abs(alpha)) - x / 2
    unit = alpha / abs(alpha)
    # m >= n carries alpha^(m-n); m < n carries (-alpha*)^(n-m)
    phase = np.where(m >= n, unit ** k, (-np.conj(unit)) ** k)
    lag = eval_genlaguerre(lo, k, x)
    out = np.exp(log_mag) * lag * phase
    if not np.all(np.isfinite(out)):
        raise AdequacyError("Laguerre matrix elements overflowed; reduce dim or |alpha|")
    return out


def displacement(alpha: complex, dim: int, method: str = "laguerre") -> OperatorMatrix:
    """Truncated D(alpha) = exp(alpha a^dag - alpha* a).

    ``method="laguerre"`` returns exact matrix elements restricted to the
    cutoff; ``method="expm"`` exponentiates the truncated generator and is
    kept as an independent cross-check.
    """
    check_adequacy(0, alpha, dim)
    if method == "laguerre":
        idx = np.arange(dim)
        return OperatorMatrix(displacement_elements(alpha, idx[:, None], idx[None, :]))
    if method == "expm":
        a = annihilation(dim).dense()
        return OperatorMatrix(expm(alpha * a.conj().T - np.conj(alpha) * a))
    raise ValueError(f"unknown method {method!r}")


# --- states ----------------------------------------------------------------

def fock_state(n: int, dim: int | None = None) -> StateVector:
    dim = n + 1 if dim is None else dim
    if not 0 <= n < dim:
        raise DimensionMismatch(f"Fock index {n} outside cutoff {dim}")
    amps = np.zeros(dim, dtype=complex)
    amps[n] = 1.0
    return StateVector(amps)


def displaced_number_state(n: int, alpha: complex, dim: int | None = None) -> StateVector:
    """|n, alpha> = D(alpha)|n>, i.e. column n of the displacement matrix."""
    dim = required_dim(n, alpha) if dim is None else dim
    if not 0 <= n < dim:
        raise DimensionMismatch(f"Fock index {n} outside cutoff {dim}")
    if alpha == 0:
        return fock_state(n, dim)
    check_adequacy(n, alpha, dim)
    return StateVector(displacement_elements(alpha, np.arange(dim), n))


def coherent_state(alpha: complex, dim: int | None = None) -> StateVector:
    return displaced_number_state(0, alpha, dim)


# --- algebra ---------------------------------------------------------------

def _amps(state) -> np.ndarray:
    return state.amplitudes


def tensor(*states, labels: Sequence[str] | None = None) -> MultiModeState:
    """Outer product of single- or multi-mode factors, modes concatenated in order."""
    if len(states) == 1 and isinstance(states[0], (list, tuple)):
        states = tuple(states[0])
    if not states:
        raise DimensionMismatch("tensor of nothing")
    amps = _amps(states[0])
    for s in states[1:]:
        amps = np.multiply.outer(amps, _amps(s))
    if labels is None:
        parts = []
        for s in states:
            parts.extend(s.labels if isinstance(s, MultiModeState) else [None])
        if None in parts or len(set(parts)) != len(parts):
            parts = [str(k + 1) for k in range(amps.ndim)]
        labels = parts
    return MultiModeState(amps, tuple(labels))


def _check_same(psi, phi):
    if type(psi) is not type(phi):
        raise DimensionMismatch("cannot mix StateVector and MultiModeState")
    if _amps(psi).shape != _amps(phi).shape:
        raise DimensionMismatch(f"shapes {_amps(psi).shape} and {_amps(phi).shape} differ")
    if isinstance(psi, MultiModeState) and psi.labels != phi.labels:
        raise ModeMismatch(f"mode labels {psi.labels} vs {phi.labels}")


def inner(psi, phi) -> complex:
    """<psi|phi>."""
    _check_same(psi, phi)
    return complex(np.vdot(_amps(psi), _amps(phi)))


def normalize(psi):
    """Return ``(normalized_state, original_norm)``."""
    nrm = psi.norm
    if nrm == 0:
        raise ZeroNorm("cannot normalize the zero vector")
    amps = _amps(psi) / nrm
    out = StateVector(amps) if isinstance(psi, StateVector) else MultiModeState(amps, psi.labels)
    return out, nrm


def fidelity(psi, phi) -> float:
    """|<psi|phi>|^2 after normalizing both; cutoffs are zero-padded to match."""
    a, b = _amps(psi), _amps(phi)
    if a.ndim != b.ndim:
        raise DimensionMismatch("different mode counts")
    if isinstance(psi, MultiModeState) and isinstance(phi, MultiModeState) and len(set(psi.labels) ^ set(phi.labels)) == 0:
        b = np.transpose(b, [phi.labels.index(l) for l in psi.labels])
    shape = tuple(max(x, y) for x, y in zip(a.shape, b.shape))
    pa = np.zeros(shape, complex)
    pa[tuple(slice(0, s) for s in a.shape)] = a
    pb = np.zeros(shape, complex)
    pb[tuple(slice(0, s) for s in b.shape)] = b
    na, nb = np.linalg.norm(pa), np.linalg.norm(pb)
    if na == 0 or nb == 0:
        raise ZeroNorm("fidelity with a zero vector")
    return float(abs(np.vdot(pa, pb)) ** 2 / (na * nb) ** 2)


def apply(op: OperatorMatrix, psi):
    """Apply an operator acting on the whole state (single mode or full product space)."""
    amps = _amps(psi)
    if op.diagonal:
        if op.entries.shape != amps.shape and op.entries.size != amps.size:
            raise DimensionMismatch(f"operator {op.entries.shape} vs state {amps.shape}")
        out = op.entries.reshape(amps.shape) * amps
    else:
        if op.shape != (amps.size, amps.size):
            raise DimensionMismatch(f"operator {op.shape} vs state of size {amps.size}")
        out = (op.dense() @ amps.ravel()).reshape(amps.shape)
    return StateVector(out) if isinstance(psi, StateVector) else MultiModeState(out, psi.labels)


def apply_to_mode(op: OperatorMatrix, psi: MultiModeState, label: str) -> MultiModeState:
    """Apply a dense single-mode operator to one axis of a multimode state."""
    ax = psi.axis(label)
    m = op.dense()
    if m.shape != (psi.dims[ax], psi.dims[ax]):
        raise DimensionMismatch(f"operator {m.shape} vs mode {label} of dim {psi.dims[ax]}")
    out = np.moveaxis(np.tensordot(m, psi.amplitudes, axes=([1], [ax])), 0, ax)
    return MultiModeState(out, psi.labels)


def expectation(op: OperatorMatrix, psi) -> complex:
    amps = _amps(psi)
    if op.diagonal:
        if op.entries.size != amps.size:
            raise DimensionMismatch(f"operator {op.entries.shape} vs state {amps.shape}")
        return complex(np.sum(op.entries.reshape(amps.shape) * np.abs(amps) ** 2))
    return complex(np.vdot(amps.ravel(), _amps(apply(op, psi)).ravel()))


def variance(op: OperatorMatrix, psi, imag_tol: float = 1e-10) -> float:
    """<op^2> - <op>^2 for a Hermitian ``op``; the imaginary residue is checked then dropped."""
    mean = expectation(op, psi)
    if op.diagonal:
        second = expectation(OperatorMatrix(op.entries ** 2, op.modes, True), psi)
    else:
        phi = _amps(apply(op, psi)).ravel()
        second = complex(np.vdot(phi, phi))
    var = second - mean ** 2
    if abs(var.imag) > imag_tol * max(1.0, abs(var.real)):
        raise ValueError(f"variance has imaginary part {var.imag:.3g}; operator not Hermitian?")
    return float(var.real)

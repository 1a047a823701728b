"""Finite-dimensional Hilbert-space foundation.

States, dense operators, standard builders (Fock ladder, periodic grid,
Pauli), inner products, Born probabilities and unitary evolution.  All
objects are immutable values; all functions are pure.  hbar defaults to 1
everywhere and can be overridden per call or per config.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    BasisMismatch,
    IncompleteBasis,
    InvalidConfig,
    NotHermitian,
)

NORM_ATOL = 1e-12
HERMITIAN_ATOL = 1e-12
BASIS_ATOL = 1e-10

# Fock states with edge weight above this trip TruncationWarning in the
# experiment layer: the truncated commutator is only exact off the edge.
EDGE_AMPLITUDE_WARN = 1e-10


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class StateVector:
    """Normalized complex amplitudes over a labeled finite basis."""

    basis_id: str
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1).copy()
        if amps.size < 1:
            raise InvalidConfig("state needs at least one amplitude")
        norm = float(np.linalg.norm(amps))
        if norm < 1e-300:
            raise InvalidConfig("cannot normalize a zero state vector")
        object.__setattr__(self, "amplitudes", _freeze(amps / norm))

    @property
    def dim(self) -> int:
        return self.amplitudes.size


@dataclass(frozen=True)
class Operator:
    """Dense complex square matrix over a labeled basis.

    ``units`` is carried as free-form metadata (e.g. "length").  If
    ``hermitian_hint`` is set to True the matrix is checked against it at
    construction time.
    """

    basis_id: str
    matrix: np.ndarray
    units: str = ""
    hermitian_hint: bool | None = None

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex).copy()
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise InvalidConfig(f"operator matrix must be square, got {mat.shape}")
        if self.hermitian_hint:
            resid = float(np.max(np.abs(mat - mat.conj().T)))
            if resid > HERMITIAN_ATOL:
                raise NotHermitian(
                    f"hermitian_hint=True but max|M - M^dag| = {resid:.3e}"
                )
        object.__setattr__(self, "matrix", _freeze(mat))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class FockConfig:
    """Truncated harmonic-oscillator representation, levels 0..dim-1."""

    dim: int = 64
    hbar: float = 1.0
    mass_freq_product: float = 1.0

    def __post_init__(self):
        if self.dim < 2:
            raise InvalidConfig(f"Fock truncation needs dim >= 2, got {self.dim}")
        if self.hbar <= 0 or self.mass_freq_product <= 0:
            raise InvalidConfig("hbar and mass_freq_product must be positive")

    @property
    def basis_id(self) -> str:
        return f"fock(dim={self.dim})"


@dataclass(frozen=True)
class GridConfig:
    """Periodic position grid spanning [-length/2, length/2)."""

    n_points: int
    length: float
    hbar: float = 1.0

    def __post_init__(self):
        if self.n_points < 8:
            raise InvalidConfig(f"grid needs n_points >= 8, got {self.n_points}")
        if self.length <= 0:
            raise InvalidConfig("grid length must be positive")

    @property
    def spacing(self) -> float:
        return self.length / self.n_points

    def positions(self) -> np.ndarray:
        return -0.5 * self.length + self.spacing * np.arange(self.n_points)

    def wavenumbers(self) -> np.ndarray:
        """Angular wavenumbers in FFT order."""
        return 2.0 * np.pi * np.fft.fftfreq(self.n_points, d=self.spacing)

    @property
    def basis_id(self) -> str:
        return f"grid(n={self.n_points},L={self.length!r})"


def _require_same_basis(a, b) -> None:
    if a.basis_id != b.basis_id:
        raise BasisMismatch(f"basis {a.basis_id!r} vs {b.basis_id!r}")


def basis_state(dim: int, index: int, basis_id: str = "") -> StateVector:
    """Computational basis vector |index> of the given dimension."""
    if not 0 <= index < dim:
        raise InvalidConfig(f"basis index {index} outside 0..{dim - 1}")
    amps = np.zeros(dim, dtype=complex)
    amps[index] = 1.0
    return StateVector(basis_id or f"generic(dim={dim})", amps)


def make_fock_ops(cfg: FockConfig) -> tuple[Operator, Operator]:
    """Position and momentum in the truncated ladder representation.

    x = sqrt(hbar/2mw)(a + a+), p = i sqrt(hbar mw/2)(a+ - a).  The
    truncated commutator is i*hbar*diag(1, ..., 1, 1-N) exactly.
    """
    n = cfg.dim
    a = np.zeros((n, n), dtype=complex)
    levels = np.arange(1, n)
    a[levels - 1, levels] = np.sqrt(levels)
    adag = a.conj().T
    cx = math.sqrt(cfg.hbar / (2.0 * cfg.mass_freq_product))
    cp = math.sqrt(cfg.hbar * cfg.mass_freq_product / 2.0)
    x = Operator(cfg.basis_id, cx * (a + adag), units="length", hermitian_hint=True)
    p = Operator(cfg.basis_id, 1j * cp * (adag - a), units="momentum", hermitian_hint=True)
    return x, p


def make_grid_ops(cfg: GridConfig) -> tuple[Operator, Operator]:
    """Diagonal position and spectral (Fourier) momentum on the grid.

    The momentum matrix is exact on band-limited periodic states; it is
    symmetrized to remove FFT roundoff so the Hermiticity residual is 0.
    """
    n = cfg.n_points
    x = Operator(
        cfg.basis_id,
        np.diag(cfg.positions().astype(complex)),
        units="length",
        hermitian_hint=True,
    )
    k = cfg.wavenumbers()
    pmat = np.fft.ifft(k[:, None] * np.fft.fft(np.eye(n), axis=0), axis=0) * cfg.hbar
    pmat = 0.5 * (pmat + pmat.conj().T)
    p = Operator(cfg.basis_id, pmat, units="momentum", hermitian_hint=True)
    return x, p


PAULI_BASIS_ID = "spin-1/2"

_PAULI = {
    "x": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}


def pauli(axis: str) -> Operator:
    """One of the three Pauli matrices on the spin-1/2 basis."""
    try:
        mat = _PAULI[axis]
    except KeyError:
        raise InvalidConfig(f"pauli axis must be x, y or z, got {axis!r}") from None
    return Operator(PAULI_BASIS_ID, mat, units="dimensionless", hermitian_hint=True)


def inner(psi: StateVector, phi: StateVector) -> complex:
    """<psi|phi>, conjugate-linear in the first argument."""
    _require_same_basis(psi, phi)
    return complex(np.vdot(psi.amplitudes, phi.amplitudes))


def matrix_element(psi: StateVector, op: Operator, phi: StateVector) -> complex:
    """<psi|op|phi>."""
    _require_same_basis(psi, op)
    _require_same_basis(op, phi)
    return complex(np.vdot(psi.amplitudes, op.matrix @ phi.amplitudes))


def expectation(psi: StateVector, op: Operator) -> complex:
    """<psi|op|psi>."""
    return matrix_element(psi, op, psi)


def apply_operator(op: Operator, psi: StateVector) -> StateVector:
    """Normalized op|psi>; raises InvalidConfig if op annihilates psi."""
    _require_same_basis(op, psi)
    return StateVector(psi.basis_id, op.matrix @ psi.amplitudes)


def unitary_of(h: Operator, t: float, hbar: float = 1.0) -> Operator:
    """exp(-i*h*t/hbar) via Hermitian eigendecomposition."""
    resid = float(np.max(np.abs(h.matrix - h.matrix.conj().T)))
    if resid > HERMITIAN_ATOL:
        raise NotHermitian(f"unitary_of needs Hermitian input, residual {resid:.3e}")
    w, v = np.linalg.eigh(h.matrix)
    u = (v * np.exp(-1j * w * t / hbar)) @ v.conj().T
    return Operator(h.basis_id, u)


def _basis_matrix(basis, dim: int, basis_id: str) -> np.ndarray:
    """Rows are the basis amplitudes; validates orthonormal completeness."""
    if len(basis) != dim:
        raise IncompleteBasis(f"basis has {len(basis)} states, dim is {dim}")
    for b in basis:
        if b.basis_id != basis_id:
            raise BasisMismatch(f"basis {b.basis_id!r} vs {basis_id!r}")
    rows = np.stack([b.amplitudes for b in basis])
    gram = rows.conj() @ rows.T
    resid = float(np.max(np.abs(gram - np.eye(dim))))
    if resid > BASIS_ATOL:
        raise IncompleteBasis(f"basis not orthonormal, Gram residual {resid:.3e}")
    return rows


def born_probabilities(psi: StateVector, basis) -> np.ndarray:
    """Weights |<f|psi>|^2 over an orthonormal complete basis."""
    rows = _basis_matrix(basis, psi.dim, psi.basis_id)
    return np.abs(rows.conj() @ psi.amplitudes) ** 2


def eigenbasis(op: Operator) -> tuple[np.ndarray, list[StateVector]]:
    """Eigenvalues and normalized eigenvectors of a Hermitian operator."""
    resid = float(np.max(np.abs(op.matrix - op.matrix.conj().T)))
    if resid > HERMITIAN_ATOL:
        raise NotHermitian(f"eigenbasis needs Hermitian input, residual {resid:.3e}")
    w, v = np.linalg.eigh(op.matrix)
    states = [StateVector(op.basis_id, v[:, j]) for j in range(op.dim)]
    return w, states


def random_state(dim: int, seed: int, basis_id: str = "") -> StateVector:
    """Haar-ish random normalized state, deterministic for fixed seed."""
    if dim < 1:
        raise InvalidConfig("dim must be >= 1")
    rng = np.random.default_rng(seed)
    amps = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return StateVector(basis_id or f"generic(dim={dim})", amps)


def random_hermitian(dim: int, seed: int, basis_id: str = "") -> Operator:
    """Random Hermitian matrix (GUE-style), deterministic for fixed seed."""
    if dim < 1:
        raise InvalidConfig("dim must be >= 1")
    rng = np.random.default_rng(seed)
    m = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return Operator(
        basis_id or f"generic(dim={dim})",
        0.5 * (m + m.conj().T),
        hermitian_hint=True,
    )


def edge_amplitude(psi: StateVector) -> float:
    """Max |amplitude| on the top two levels; the truncation-safety figure."""
    return float(np.max(np.abs(psi.amplitudes[-2:])))


def gaussian_grid_state(
    cfg: GridConfig,
    width: float,
    center: float = 0.0,
    momentum: float = 0.0,
) -> StateVector:
    """Gaussian wavepacket exp(-(x-c)^2/4w^2 + i k x) sampled on the grid.

    ``width`` is the standard deviation of |psi|^2.  The packet must fit
    the periodic box; tails wrapping around the boundary are the caller's
    responsibility (keep width <= length/8).
    """
    if width <= 0:
        raise InvalidConfig("gaussian width must be positive")
    x = cfg.positions()
    k = momentum / cfg.hbar
    amps = np.exp(-((x - center) ** 2) / (4.0 * width**2) + 1j * k * x)
    return StateVector(cfg.basis_id, amps)


def coherent_state(cfg: FockConfig, displacement: complex) -> StateVector:
    """Truncated coherent state c_n = e^{-|a|^2/2} a^n / sqrt(n!).

    Renormalized after truncation; callers should keep |displacement| small
    enough that edge_amplitude stays below EDGE_AMPLITUDE_WARN.
    """
    n = np.arange(cfg.dim)
    log_fact = np.cumsum(np.concatenate(([0.0], np.log(np.arange(1, cfg.dim)))))
    mag = np.exp(-0.5 * abs(displacement) ** 2 + n * np.log(max(abs(displacement), 1e-300)) - 0.5 * log_fact)
    phase = np.exp(1j * n * np.angle(displacement)) if displacement != 0 else np.ones(cfg.dim)
    amps = mag * phase
    if displacement == 0:
        amps = np.zeros(cfg.dim, dtype=complex)
        amps[0] = 1.0
    return StateVector(cfg.basis_id, amps)

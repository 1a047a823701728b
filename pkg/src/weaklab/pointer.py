"""Exact simulation of the von Neumann measurement chain.

Gaussian pointer preparation, impulsive system-pointer couplings applied
as exact unitaries (never the first-order expansion; the textbook
expansions are shipped as predictions to compare against), strong
selections, and pointer readout in position and momentum.

Conventions: pointers live on periodic grids with L2 normalization
sum |psi|^2 dx = 1.  The coupling Hamiltonian is
sign * g * (observable x generator) integrated to unit impulse, so the
applied unitary is exp(-i * sign * g * observable x generator / hbar);
the position-position stage uses sign = -1, the momentum-momentum stage
sign = +1.  hbar is taken from the pointer grid config.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    BasisMismatch,
    GridResolutionError,
    InvalidConfig,
    NotHermitian,
    OrthogonalSelection,
    SelectionAnnihilated,
)
from .hilbert import GridConfig, Operator, StateVector
from .weakcorr import FORWARD, REVERSE, weak_value

ANNIHILATION_ATOL = 1e-15

POSITION = "position"
MOMENTUM = "momentum"

DEFAULT_POINTER_POINTS = 1024
DEFAULT_POINTER_WIDTHS = 40.0  # grid length in units of sigma


def default_pointer_grid(sigma: float, hbar: float = 1.0) -> GridConfig:
    return GridConfig(DEFAULT_POINTER_POINTS, DEFAULT_POINTER_WIDTHS * sigma, hbar)


@dataclass(frozen=True)
class PointerState:
    """One-dimensional grid wavefunction with its nominal Gaussian width."""

    grid: GridConfig
    wavefunction: np.ndarray
    sigma: float

    def __post_init__(self):
        psi = np.asarray(self.wavefunction, dtype=complex).reshape(-1).copy()
        if psi.size != self.grid.n_points:
            raise InvalidConfig("wavefunction length does not match grid")
        norm = math.sqrt(float(np.sum(np.abs(psi) ** 2)) * self.grid.spacing)
        if norm < 1e-300:
            raise InvalidConfig("cannot normalize a zero pointer state")
        psi /= norm
        psi.flags.writeable = False
        object.__setattr__(self, "wavefunction", psi)


@dataclass(frozen=True)
class JointState:
    """System x pointer amplitudes, shape (system_dim, n_points)."""

    system_basis_id: str
    grid: GridConfig
    amplitudes: np.ndarray
    sigma: float

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).copy()
        if amps.ndim != 2 or amps.shape[1] != self.grid.n_points:
            raise InvalidConfig(f"joint amplitudes have shape {amps.shape}")
        norm = math.sqrt(float(np.sum(np.abs(amps) ** 2)) * self.grid.spacing)
        if norm < 1e-300:
            raise InvalidConfig("cannot normalize a zero joint state")
        amps /= norm
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @property
    def system_dim(self) -> int:
        return self.amplitudes.shape[0]


@dataclass(frozen=True)
class CouplingSpec:
    """Impulsive coupling sign * g * observable x pointer-quadrature."""

    observable: Operator
    pointer_generator: str
    strength: float
    sign: int = -1

    def __post_init__(self):
        if self.pointer_generator not in (POSITION, MOMENTUM):
            raise InvalidConfig(
                f"pointer_generator must be {POSITION!r} or {MOMENTUM!r}"
            )
        if not math.isfinite(self.strength):
            raise InvalidConfig("coupling strength must be finite")
        if self.sign not in (-1, 1):
            raise InvalidConfig("sign must be +1 or -1")


def gaussian_pointer(grid: GridConfig, sigma: float) -> PointerState:
    """Real centered Gaussian of probability width sigma on the grid."""
    if sigma < 4.0 * grid.spacing:
        raise GridResolutionError(
            f"sigma = {sigma} under-resolved: needs >= 4 * spacing = {4 * grid.spacing}"
        )
    if sigma > grid.length / 8.0:
        raise GridResolutionError(
            f"sigma = {sigma} too wide for box: needs <= length/8 = {grid.length / 8}"
        )
    x = grid.positions()
    psi = np.exp(-(x**2) / (4.0 * sigma**2))
    return PointerState(grid, psi, sigma)


def product_joint(system: StateVector, pointer: PointerState) -> JointState:
    """|system> x |pointer>."""
    amps = np.outer(system.amplitudes, pointer.wavefunction)
    return JointState(system.basis_id, pointer.grid, amps, pointer.sigma)


def _observable_eigensystem(op: Operator):
    mat = op.matrix
    if np.max(np.abs(mat - mat.conj().T)) > 1e-12:
        raise NotHermitian("coupled observable must be Hermitian")
    off = mat - np.diag(np.diag(mat))
    if np.count_nonzero(off) == 0:
        return np.real(np.diag(mat)), None  # already diagonal
    w, v = np.linalg.eigh(mat)
    return w, v


def couple(joint: JointState, spec: CouplingSpec) -> JointState:
    """Apply exp(-i * sign * g * observable x generator / hbar) exactly.

    Position generator: system-conditional phase profile.  Momentum
    generator: system-conditional translation, applied in the Fourier
    domain (exact for band-limited pointers).
    """
    if spec.observable.basis_id != joint.system_basis_id:
        raise BasisMismatch(
            f"observable on {spec.observable.basis_id!r}, joint system on "
            f"{joint.system_basis_id!r}"
        )
    if spec.observable.dim != joint.system_dim:
        raise BasisMismatch("observable dimension does not match joint system")
    w, v = _observable_eigensystem(spec.observable)
    b = joint.amplitudes if v is None else v.conj().T @ joint.amplitudes
    coeff = -1j * spec.sign * spec.strength
    if spec.pointer_generator == POSITION:
        phase = np.exp(coeff * np.outer(w, joint.grid.positions()) / joint.grid.hbar)
        b = b * phase
    else:
        k = joint.grid.wavenumbers()  # p_d = hbar k, the hbar cancels
        phase = np.exp(coeff * np.outer(w, k))
        b = np.fft.ifft(np.fft.fft(b, axis=1) * phase, axis=1)
    amps = b if v is None else v @ b
    return JointState(joint.system_basis_id, joint.grid, amps, joint.sigma)


def select(joint: JointState, target: StateVector) -> tuple[PointerState, float]:
    """Project the system onto ``target``.

    Returns the renormalized conditional pointer together with the
    selection amplitude (the L2 norm of the unnormalized conditional
    wavefunction <target|joint>); the success probability is amplitude**2
    and the unnormalized wavefunction is amplitude * pointer.
    """
    if target.basis_id != joint.system_basis_id:
        raise BasisMismatch(
            f"target on {target.basis_id!r}, joint system on "
            f"{joint.system_basis_id!r}"
        )
    raw = target.amplitudes.conj() @ joint.amplitudes
    amplitude = math.sqrt(float(np.sum(np.abs(raw) ** 2)) * joint.grid.spacing)
    if amplitude <= ANNIHILATION_ATOL:
        raise SelectionAnnihilated(
            f"selection amplitude {amplitude:.3e} <= {ANNIHILATION_ATOL}"
        )
    return PointerState(joint.grid, raw, joint.sigma), amplitude


def pointer_mean_position(p: PointerState) -> float:
    """Grid-quadrature mean of the position readout."""
    prob = np.abs(p.wavefunction) ** 2 * p.grid.spacing
    return float(np.sum(p.grid.positions() * prob))


def momentum_distribution(p: PointerState) -> tuple[np.ndarray, np.ndarray]:
    """Momentum readout values hbar*k (FFT order) and their probabilities."""
    ft = np.fft.fft(p.wavefunction)
    probs = (p.grid.spacing / p.grid.n_points) * np.abs(ft) ** 2
    values = p.grid.hbar * p.grid.wavenumbers()
    return values, probs


def position_distribution(p: PointerState) -> tuple[np.ndarray, np.ndarray]:
    """Position readout values and their grid-cell probabilities."""
    return p.grid.positions(), np.abs(p.wavefunction) ** 2 * p.grid.spacing


def readout_distribution(p: PointerState, kind: str) -> tuple[np.ndarray, np.ndarray]:
    if kind == POSITION:
        return position_distribution(p)
    if kind == MOMENTUM:
        return momentum_distribution(p)
    raise InvalidConfig(f"readout kind must be {POSITION!r} or {MOMENTUM!r}")


def pointer_mean_momentum(p: PointerState) -> float:
    """Fourier-quadrature mean of the momentum readout."""
    values, probs = momentum_distribution(p)
    return float(np.sum(values * probs))


def predicted_shifts(x_w: complex, sigma: float, hbar: float = 1.0) -> tuple[float, float]:
    """First-order pointer shifts for an (already strength-scaled) weak value.

    dx = -2 sigma^2 Im{x_w} / hbar and dp = Re{x_w}.  Callers pass
    g * (weak value); the hbar-consistent form of the position shift is
    used (at hbar = 1 it coincides with the bare -2 sigma^2 Im{x_w}).
    """
    return -2.0 * sigma**2 * complex(x_w).imag / hbar, complex(x_w).real


@dataclass(frozen=True)
class WeakStageResult:
    """One weak coupling plus selection: conditional pointer and probability."""

    pointer: PointerState
    probability: float
    amplitude: float


def measure_weakly(
    i: StateVector,
    f: StateVector,
    observable: Operator,
    sigma: float,
    g: float,
    grid: GridConfig | None = None,
    generator: str = POSITION,
    sign: int = -1,
    hbar: float = 1.0,
) -> WeakStageResult:
    """Prepare i x Gaussian, couple, select f; exact throughout."""
    grid = grid or default_pointer_grid(sigma, hbar)
    if grid.hbar != hbar:
        raise InvalidConfig(
            f"pointer grid hbar {grid.hbar} != protocol hbar {hbar}"
        )
    phi = gaussian_pointer(grid, sigma)
    joint = couple(product_joint(i, phi), CouplingSpec(observable, generator, g, sign))
    cond, amp = select(joint, f)
    return WeakStageResult(pointer=cond, probability=amp * amp, amplitude=amp)


@dataclass(frozen=True)
class CcrProtocolResult:
    """Readouts and bookkeeping of one two-stage commutator run."""

    dx_d: float
    dx_d_prime: float
    prob_mid: float
    prob_post: float
    pointer_first: PointerState
    pointer_second: PointerState
    x_w: complex
    p_w_bar: complex
    predicted_dx: float
    predicted_dx_prime: float


def run_ccr_protocol(
    i: StateVector,
    f: StateVector,
    x_op: Operator,
    p_op: Operator,
    sigma: float,
    sigma_prime: float,
    g: float,
    grid: GridConfig | None = None,
    grid_prime: GridConfig | None = None,
    hbar: float = 1.0,
) -> CcrProtocolResult:
    """Full exact chain of the two-pointer commutator measurement.

    Stage one: prepare i x P, couple position-position with strength g
    (attractive sign), select f, read P's position.  Stage two: prepare
    f x P', couple momentum-momentum, select i again, read P''s position.
    First-order predictions from the closed-form weak values ride along
    so the weakness error is measurable.
    """
    grid = grid or default_pointer_grid(sigma, hbar)
    grid_prime = grid_prime or default_pointer_grid(sigma_prime, hbar)
    nan = complex(float("nan"), float("nan"))
    try:
        x_w = weak_value(i, f, x_op, FORWARD).value
        p_w_bar = weak_value(i, f, p_op, REVERSE).value  # <i|p|f>/<i|f>
    except OrthogonalSelection:
        # predictions undefined; the exact chain below decides whether the
        # selections annihilate
        x_w = p_w_bar = nan
    predicted_dx = -2.0 * sigma**2 * g * x_w.imag / hbar
    predicted_dx_prime = g * p_w_bar.real
    if math.isfinite(predicted_dx) and abs(predicted_dx) > grid.length / 4.0:
        raise GridResolutionError(
            f"predicted P shift {predicted_dx:.3g} exceeds length/4 = {grid.length / 4}"
        )
    if math.isfinite(abs(g * p_w_bar)) and abs(g * p_w_bar) > grid_prime.length / 4.0:
        raise GridResolutionError(
            f"predicted P' translation {abs(g * p_w_bar):.3g} exceeds "
            f"length/4 = {grid_prime.length / 4}"
        )

    stage1 = measure_weakly(
        i, f, x_op, sigma, g, grid, generator=POSITION, sign=-1, hbar=hbar
    )
    stage2 = measure_weakly(
        f, i, p_op, sigma_prime, g, grid_prime, generator=MOMENTUM, sign=+1, hbar=hbar
    )
    return CcrProtocolResult(
        dx_d=pointer_mean_position(stage1.pointer),
        dx_d_prime=pointer_mean_position(stage2.pointer),
        prob_mid=stage1.probability,
        prob_post=stage2.probability,
        pointer_first=stage1.pointer,
        pointer_second=stage2.pointer,
        x_w=x_w,
        p_w_bar=p_w_bar,
        predicted_dx=predicted_dx,
        predicted_dx_prime=predicted_dx_prime,
    )

"""Closed-form weak values and weak correlation functions.

Forward/reverse weak values, two-operator weak correlations and their
(anti)commutator combinations, Born-weighted averages over a complete
mid-selection basis, high-order selection chains, dual correlations and
the associated symmetry residuals.

Two readings of the bracket around operator products are implemented
side by side: the per-selection product (single mid-state f) and the
Born-weighted average over a complete basis {f}.  Only the averaged form
carries an exact operator identity (it telescopes to <i|A B|i> by the
resolution of identity); experiment reports show both.

Of the dual-procedure symmetries, the even-order ones (order swap under
interchange, commutator sign flip) are checked numerically via
``symmetry_residuals``.  The odd-order chain displays whose two sides
are syntactically identical are self-equalities: they hold by
construction and are not separately implemented.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ArityMismatch, OrthogonalSelection
from .hilbert import Operator, StateVector, _basis_matrix, _require_same_basis, inner

# Below this overlap (unit-norm states) the weak-value ratio has no
# significant digits left in double precision.
ORTHOGONALITY_EPS = 1e-12

FORWARD = "forward"
REVERSE = "reverse"


@dataclass(frozen=True)
class WeakValueResult:
    """Complex weak value with its selection overlap and direction."""

    value: complex
    overlap: complex
    direction: str

    @property
    def re(self) -> float:
        return self.value.real

    @property
    def im(self) -> float:
        return self.value.imag


@dataclass(frozen=True)
class SelectionProtocol:
    """Ordered strong selections: pre, alternating mids, post."""

    pre: StateVector
    mid_sequence: tuple
    post: StateVector

    def __post_init__(self):
        object.__setattr__(self, "mid_sequence", tuple(self.mid_sequence))
        states = self.states
        for a, b in zip(states, states[1:]):
            if abs(inner(b, a)) <= ORTHOGONALITY_EPS:
                raise OrthogonalSelection(
                    "adjacent selections are (numerically) orthogonal"
                )

    @property
    def states(self) -> tuple:
        return (self.pre, *self.mid_sequence, self.post)

    @property
    def n_gaps(self) -> int:
        return len(self.states) - 1

    @classmethod
    def alternating(cls, i: StateVector, f: StateVector, n_ops: int) -> "SelectionProtocol":
        """The canonical |i>,|f>,|i>,|f>,... protocol with n_ops gaps."""
        if n_ops < 1:
            raise ArityMismatch("need at least one weakly measured operator")
        seq = [i if k % 2 == 0 else f for k in range(n_ops + 1)]
        return cls(pre=seq[0], mid_sequence=tuple(seq[1:-1]), post=seq[-1])


def _overlap_checked(bra: StateVector, ket: StateVector, eps: float) -> complex:
    ov = inner(bra, ket)
    if abs(ov) <= eps:
        raise OrthogonalSelection(
            f"selection overlap |<f|i>| = {abs(ov):.3e} <= eps = {eps:.1e}"
        )
    return ov


def weak_value(
    i: StateVector,
    f: StateVector,
    op: Operator,
    direction: str = FORWARD,
    eps: float = ORTHOGONALITY_EPS,
) -> WeakValueResult:
    """<f|op|i>/<f|i> (forward) or <i|op|f>/<i|f> (reverse).

    For Hermitian op the reverse value is the complex conjugate of the
    forward one.
    """
    _require_same_basis(i, op)
    _require_same_basis(f, op)
    if direction == FORWARD:
        ov = _overlap_checked(f, i, eps)
        val = complex(np.vdot(f.amplitudes, op.matrix @ i.amplitudes)) / ov
    elif direction == REVERSE:
        ov = _overlap_checked(i, f, eps)
        val = complex(np.vdot(i.amplitudes, op.matrix @ f.amplitudes)) / ov
    else:
        raise ArityMismatch(f"direction must be forward or reverse, got {direction!r}")
    return WeakValueResult(value=val, overlap=ov, direction=direction)


def _chain_value(states, ops, eps: float) -> complex:
    """Product of gap matrix elements over product of gap overlaps."""
    if len(ops) != len(states) - 1:
        raise ArityMismatch(
            f"{len(ops)} operators for {len(states) - 1} selection gaps"
        )
    num = complex(1.0)
    den = complex(1.0)
    for k, op in enumerate(ops):
        lo, hi = states[k], states[k + 1]
        _require_same_basis(lo, op)
        _require_same_basis(hi, op)
        den *= _overlap_checked(hi, lo, eps)
        num *= complex(np.vdot(hi.amplitudes, op.matrix @ lo.amplitudes))
    return num / den


def weak_correlation(
    i: StateVector,
    f: StateVector,
    a: Operator,
    b: Operator,
    eps: float = ORTHOGONALITY_EPS,
) -> complex:
    """<i|a|f><f|b|i> / (<i|f><f|i>): b weakly measured first, then a.

    Equals reverse-weak-value(a) times forward-weak-value(b).  Swapping
    the argument order gives the opposite measurement order.
    """
    return _chain_value((i, f, i), (b, a), eps)


def weak_commutator(i, f, a, b, eps: float = ORTHOGONALITY_EPS) -> complex:
    """Weak correlation of [a,b]; purely imaginary for Hermitian a, b."""
    return weak_correlation(i, f, a, b, eps) - weak_correlation(i, f, b, a, eps)


def weak_anticommutator(i, f, a, b, eps: float = ORTHOGONALITY_EPS) -> complex:
    """Weak correlation of {a,b}; real for Hermitian a, b."""
    return weak_correlation(i, f, a, b, eps) + weak_correlation(i, f, b, a, eps)


_COMBINES = ("commutator", "anticommutator", "product")


def averaged_weak_correlation(
    i: StateVector,
    basis,
    a: Operator,
    b: Operator,
    combine: str = "product",
    eps: float = ORTHOGONALITY_EPS,
) -> complex:
    """Born-weighted sum over mid-selections f of the weak correlation.

    Each admissible term |<f|i>|^2 <...>_w^(f) cancels algebraically to
    plain matrix elements (e.g. <i|a|f><f|b|i> for the product), which is
    how it is evaluated here; no small-overlap division occurs.  Terms
    with |<f|i>| <= eps are defined as zero (the weight annihilates the
    divergent weak value).  When no term is skipped the sum telescopes to
    <i| a b |i> (and the commutator/anticommutator analogues) exactly.
    """
    if combine not in _COMBINES:
        raise ArityMismatch(f"combine must be one of {_COMBINES}, got {combine!r}")
    _require_same_basis(i, a)
    _require_same_basis(i, b)
    rows = _basis_matrix(basis, i.dim, i.basis_id)
    overlaps = rows.conj() @ i.amplitudes  # <f|i> per basis row
    keep = np.abs(overlaps) > eps

    # <i|a|f> and <f|b|i> for every f at once
    i_a_f = (i.amplitudes.conj() @ a.matrix) @ rows.T
    f_b_i = rows.conj() @ (b.matrix @ i.amplitudes)
    forward = i_a_f * f_b_i  # weight * <ab>_w^(f), cancelled form
    if combine == "product":
        return complex(np.sum(forward[keep]))
    i_b_f = (i.amplitudes.conj() @ b.matrix) @ rows.T
    f_a_i = rows.conj() @ (a.matrix @ i.amplitudes)
    swapped = i_b_f * f_a_i
    if combine == "commutator":
        return complex(np.sum(forward[keep] - swapped[keep]))
    return complex(np.sum(forward[keep] + swapped[keep]))


@dataclass(frozen=True)
class CcrDecomposition:
    """Per-selection real-part combination of the canonical commutator.

    ``lhs`` is Re{x_w}Im{p_w} - Im{x_w}Re{p_w} for one mid-selection;
    only its Born average over a complete basis has to equal ``target``
    (= hbar/2).  ``simplified_lhs`` is the Im{x_w} * p_w variant, valid
    when ``p_imag_is_zero``; its averaged target is -hbar/2.
    """

    x_w: complex
    p_w: complex
    lhs: float
    target: float
    p_imag_is_zero: bool
    simplified_lhs: float
    simplified_target: float


def ccr_decomposition(
    i: StateVector,
    f: StateVector,
    x_op: Operator,
    p_op: Operator,
    hbar: float = 1.0,
    imag_tol: float = 1e-10,
    eps: float = ORTHOGONALITY_EPS,
) -> CcrDecomposition:
    """Real/imaginary split of the weak CCR for one mid-selection f."""
    x_w = weak_value(i, f, x_op, FORWARD, eps).value
    p_w = weak_value(i, f, p_op, FORWARD, eps).value
    lhs = x_w.real * p_w.imag - x_w.imag * p_w.real
    return CcrDecomposition(
        x_w=x_w,
        p_w=p_w,
        lhs=lhs,
        target=0.5 * hbar,
        p_imag_is_zero=abs(p_w.imag) <= imag_tol * max(1.0, abs(p_w)),
        simplified_lhs=x_w.imag * p_w.real,
        simplified_target=-0.5 * hbar,
    )


def chain_weak_correlation(
    protocol: SelectionProtocol,
    ops,
    times=None,
    eps: float = ORTHOGONALITY_EPS,
) -> complex:
    """High-order weak correlation over an alternating selection chain.

    ``ops`` are given in chronological order, one per selection gap; the
    value is the product of gap matrix elements over the product of gap
    overlaps.  ``times`` (optional coupling timestamps, one per op) are
    accepted and validated for arity only: the value is independent of
    when each weak coupling happens inside its gap (simultaneity).
    With two ops and protocol (i, f, i) this reduces bit-for-bit to
    ``weak_correlation``.
    """
    ops = tuple(ops)
    if times is not None and len(tuple(times)) != len(ops):
        raise ArityMismatch("one timestamp per operator, if given")
    return _chain_value(protocol.states, ops, eps)


def dual_weak_correlation(
    i: StateVector,
    f: StateVector,
    ops,
    eps: float = ORTHOGONALITY_EPS,
) -> complex:
    """Chain value for the interchanged procedure (pre f, mid i, ...)."""
    ops = tuple(ops)
    protocol = SelectionProtocol.alternating(f, i, len(ops))
    return _chain_value(protocol.states, ops, eps)


@dataclass(frozen=True)
class SymmetryResiduals:
    """Numerical residuals of the dual-procedure identities."""

    order_swap: float  # |<BA>_dual - <AB>|
    commutator_flip: float  # |<[A,B]> + <[A,B]>_dual|


def symmetry_residuals(
    i: StateVector,
    f: StateVector,
    a: Operator,
    b: Operator,
    eps: float = ORTHOGONALITY_EPS,
) -> SymmetryResiduals:
    """Check <BA>_dual = <AB> and <[A,B]>_dual = -<[A,B]>."""
    ab = weak_correlation(i, f, a, b, eps)
    ba_dual = dual_weak_correlation(i, f, (a, b), eps)
    comm = weak_commutator(i, f, a, b, eps)
    comm_dual = weak_commutator(f, i, a, b, eps)
    return SymmetryResiduals(
        order_swap=abs(ba_dual - ab),
        commutator_flip=abs(comm + comm_dual),
    )

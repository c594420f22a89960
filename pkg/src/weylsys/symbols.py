"""Hermitian matrix symbol fields on phase space and their eigen-jets.

A symbol field assigns an m x m Hermitian matrix to every phase-space
point (x, xi) with xi != 0.  This module evaluates such fields, computes
their eigen-decompositions with a deterministic sheet enumeration (signed
indices, negative eigenvalues get negative indices), differentiates
eigenvalues, eigenprojections and eigenvectors in all 2n phase-space
directions, and provides the Poisson bracket and its three-slot
generalisation on matrix jets.

Eigenvalue and projection derivatives are taken by five-point central
differences of gauge-free quantities.  Eigenvector derivatives require a
phase alignment of the perturbed vectors against the base point; the
published scalar quantities built from them are phase-invariant, so the
alignment convention is unobservable downstream.

Everything here is a pure function of its inputs and all returned values
are immutable; concurrent callers need no coordination.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import (
    DegenerateSpectrum,
    DimensionMismatch,
    GaugeAlignmentFailure,
    NotElliptic,
    NotHermitian,
)

HERMITICITY_TOL = 1e-10
DEFAULT_STEP = 1e-3
DEFAULT_SIMPLICITY_FACTOR = 1e-6

# Five-point central first-derivative stencil at offsets (-2h,-h,+h,+2h).
_OFFSETS = np.array([-2.0, -1.0, 1.0, 2.0])
_WEIGHTS = np.array([1.0, -8.0, 8.0, -1.0]) / 12.0


@dataclass(frozen=True)
class PhasePoint:
    """A point (x, xi) of phase space; xi must be nonzero and n >= 2."""

    x: np.ndarray
    xi: np.ndarray

    def __post_init__(self):
        x = np.atleast_1d(np.asarray(self.x, dtype=float))
        xi = np.atleast_1d(np.asarray(self.xi, dtype=float))
        if x.shape != xi.shape or x.ndim != 1:
            raise DimensionMismatch(
                f"x and xi must be equal-length vectors, got {x.shape} and {xi.shape}"
            )
        if x.size < 2:
            raise ValueError("phase space dimension must be at least 2")
        if not np.all(np.isfinite(x)) or not np.all(np.isfinite(xi)):
            raise ValueError("non-finite phase-space coordinates")
        if np.linalg.norm(xi) == 0.0:
            raise ValueError("xi = 0 is outside the symbol domain")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "xi", xi)

    @property
    def n(self) -> int:
        return self.x.size

    @property
    def xi_norm(self) -> float:
        return float(np.linalg.norm(self.xi))

    def shifted(self, kind: str, axis: int, delta: float) -> "PhasePoint":
        """Return the point displaced by delta along one x- or xi-axis."""
        if kind == "x":
            x = self.x.copy()
            x[axis] += delta
            return PhasePoint(x, self.xi)
        xi = self.xi.copy()
        xi[axis] += delta
        return PhasePoint(self.x, xi)


@dataclass(frozen=True)
class SymbolField:
    """Evaluator for an m x m Hermitian matrix field on phase space.

    Parameters
    ----------
    dim : int
        Matrix size m >= 2.
    degree : int
        Positive-homogeneity degree in xi (1 for the leading symbol,
        0 for the next-order one).
    evaluator : callable
        Maps (x, xi) arrays to an (m, m) complex matrix.
    derivatives : callable, optional
        Maps (x, xi) to a pair of (n, m, m) arrays holding the analytic
        x- and xi-derivatives.  When present, finite differences are
        bypassed for this field.
    """

    dim: int
    degree: int
    evaluator: Callable[[np.ndarray, np.ndarray], np.ndarray]
    derivatives: Optional[
        Callable[[np.ndarray, np.ndarray], tuple[np.ndarray, np.ndarray]]
    ] = None

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError("matrix dimension must be at least 2")

    def __call__(self, p: PhasePoint) -> np.ndarray:
        m = np.asarray(self.evaluator(p.x, p.xi), dtype=complex)
        if m.shape != (self.dim, self.dim):
            raise DimensionMismatch(
                f"evaluator returned shape {m.shape}, expected {(self.dim, self.dim)}"
            )
        return m

    def flipped(self) -> "SymbolField":
        """The field of the sign-flipped operator (matrix negated pointwise)."""
        ev = self.evaluator
        der = self.derivatives

        def neg_ev(x, xi):
            return -np.asarray(ev(x, xi), dtype=complex)

        neg_der = None
        if der is not None:
            def neg_der(x, xi, _d=der):
                dx, dxi = _d(x, xi)
                return -np.asarray(dx), -np.asarray(dxi)

        return SymbolField(self.dim, self.degree, neg_ev, neg_der)


@dataclass(frozen=True)
class MatrixJet:
    """Value and first phase-space derivatives of a matrix-valued map.

    ``value`` has shape (p, q); ``dx`` and ``dxi`` have shape (n, p, q).
    Row/column vectors are jets with p == 1 or q == 1.
    """

    value: np.ndarray
    dx: np.ndarray
    dxi: np.ndarray

    @property
    def n(self) -> int:
        return self.dx.shape[0]

    def conjugate_transpose(self) -> "MatrixJet":
        swap = (0, 2, 1)
        return MatrixJet(
            self.value.conj().T,
            self.dx.conj().transpose(swap),
            self.dxi.conj().transpose(swap),
        )


def require_hermitian(matrix: np.ndarray, tol: float = HERMITICITY_TOL) -> np.ndarray:
    """Validate Hermiticity to ``tol`` and return the symmetrised matrix."""
    matrix = np.asarray(matrix, dtype=complex)
    defect = np.max(np.abs(matrix - matrix.conj().T))
    scale = max(1.0, float(np.max(np.abs(matrix))))
    if defect > tol * scale:
        raise NotHermitian(f"Hermiticity defect {defect:.3e} exceeds {tol:.1e}")
    return 0.5 * (matrix + matrix.conj().T)


def _fix_phase(vectors: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude component of each column real positive."""
    out = vectors.copy()
    for i in range(out.shape[1]):
        col = out[:, i]
        k = int(np.argmax(np.abs(col)))
        piv = col[k]
        out[:, i] = col * (np.conj(piv) / abs(piv))
    return out


@dataclass(frozen=True)
class EigenSystem:
    """Sorted eigen-decomposition of one Hermitian matrix with signed sheets."""

    values: np.ndarray        # ascending, shape (m,)
    sheets: np.ndarray        # signed sheet labels, shape (m,)
    vectors: np.ndarray       # (m, m), column i belongs to values[i]
    projections: np.ndarray   # (m, m, m), projections[i] = v_i v_i^*
    gap: float

    @property
    def m_plus(self) -> int:
        return int(np.sum(self.values > 0))

    @property
    def m_minus(self) -> int:
        return int(np.sum(self.values < 0))

    def position(self, sheet: int) -> int:
        """Index into the sorted arrays for a signed sheet label."""
        hits = np.nonzero(self.sheets == sheet)[0]
        if hits.size != 1:
            raise ValueError(f"no sheet {sheet}; labels are {self.sheets.tolist()}")
        return int(hits[0])


def sheet_labels(values: np.ndarray) -> np.ndarray:
    """Signed sheet labels for ascending eigenvalues: -m_minus..-1, 1..m_plus."""
    m_minus = int(np.sum(values < 0))
    labels = np.empty(values.size, dtype=int)
    for i in range(values.size):
        labels[i] = i - m_minus if i < m_minus else i - m_minus + 1
    return labels


def eigen_decompose(
    matrix: np.ndarray,
    simplicity_tol: Optional[float] = None,
) -> EigenSystem:
    """Eigen-decompose a Hermitian matrix with ellipticity/simplicity checks.

    Eigenvalues come out in increasing order.  Negative ones receive sheet
    labels -m_minus..-1 and positive ones 1..m_plus.  Raises
    :class:`NotHermitian`, :class:`NotElliptic` or
    :class:`DegenerateSpectrum` when the respective precondition fails.
    """
    matrix = require_hermitian(matrix)
    values, vectors = np.linalg.eigh(matrix)
    radius = float(np.max(np.abs(values)))
    if simplicity_tol is None:
        simplicity_tol = DEFAULT_SIMPLICITY_FACTOR * max(radius, 1e-300)
    if np.min(np.abs(values)) < simplicity_tol:
        raise NotElliptic(
            f"eigenvalue of magnitude {np.min(np.abs(values)):.3e} below "
            f"threshold {simplicity_tol:.3e}"
        )
    gaps = np.diff(values)
    gap = float(np.min(gaps)) if gaps.size else np.inf
    if gap < simplicity_tol:
        raise DegenerateSpectrum(
            f"adjacent eigenvalue gap {gap:.3e} below threshold {simplicity_tol:.3e}"
        )
    vectors = _fix_phase(vectors)
    projections = np.einsum("ik,jk->kij", vectors, vectors.conj())
    return EigenSystem(values, sheet_labels(values), vectors, projections, gap)


def symbol_jet(
    field: SymbolField,
    p: PhasePoint,
    step: float = DEFAULT_STEP,
) -> MatrixJet:
    """Value and first derivatives of a symbol field at a phase-space point.

    Uses the field's analytic derivatives when present; otherwise five-point
    central differences with absolute step ``step`` in x and relative step
    ``step * |xi|`` in xi.  Derivative matrices of square Hermitian fields
    are re-symmetrised, which removes O(roundoff) asymmetry.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    value = field(p)
    if field.derivatives is not None:
        dx, dxi = field.derivatives(p.x, p.xi)
        dx = np.asarray(dx, dtype=complex)
        dxi = np.asarray(dxi, dtype=complex)
    else:
        n = p.n
        m = field.dim
        dx = np.empty((n, m, m), dtype=complex)
        dxi = np.empty((n, m, m), dtype=complex)
        h_x = step
        h_xi = step * p.xi_norm
        for axis in range(n):
            acc = np.zeros((m, m), dtype=complex)
            for off, w in zip(_OFFSETS, _WEIGHTS):
                acc += w * field(p.shifted("x", axis, off * h_x))
            dx[axis] = acc / h_x
            acc = np.zeros((m, m), dtype=complex)
            for off, w in zip(_OFFSETS, _WEIGHTS):
                acc += w * field(p.shifted("xi", axis, off * h_xi))
            dxi[axis] = acc / h_xi
    dx = 0.5 * (dx + dx.conj().transpose(0, 2, 1))
    dxi = 0.5 * (dxi + dxi.conj().transpose(0, 2, 1))
    return MatrixJet(value, dx, dxi)


def _check_bracket_shapes(*jets: MatrixJet) -> int:
    n = jets[0].n
    for jet in jets[1:]:
        if jet.n != n:
            raise DimensionMismatch("jets taken at different phase-space dimensions")
    return n


def poisson_bracket(jet_a: MatrixJet, jet_b: MatrixJet) -> np.ndarray:
    """{A, B} = sum_alpha (A_x B_xi - A_xi B_x) on matrix jets."""
    n = _check_bracket_shapes(jet_a, jet_b)
    if jet_a.value.shape[1] != jet_b.value.shape[0]:
        raise DimensionMismatch(
            f"cannot multiply {jet_a.value.shape} by {jet_b.value.shape}"
        )
    out = np.zeros((jet_a.value.shape[0], jet_b.value.shape[1]), dtype=complex)
    for alpha in range(n):
        out += jet_a.dx[alpha] @ jet_b.dxi[alpha]
        out -= jet_a.dxi[alpha] @ jet_b.dx[alpha]
    return out


def generalized_bracket(
    jet_f: MatrixJet,
    middle: np.ndarray,
    jet_h: MatrixJet,
) -> np.ndarray:
    """{F, G, H} = sum_alpha (F_x G H_xi - F_xi G H_x); G is not differentiated.

    F may be (p, m), G (m, m') and H (m', q); the result is (p, q).  Scalar
    brackets such as {v^*, G, v} are the 1 x 1 case.
    """
    n = _check_bracket_shapes(jet_f, jet_h)
    middle = np.asarray(middle, dtype=complex)
    if jet_f.value.shape[1] != middle.shape[0] or middle.shape[1] != jet_h.value.shape[0]:
        raise DimensionMismatch(
            f"incompatible shapes {jet_f.value.shape} / {middle.shape} / "
            f"{jet_h.value.shape}"
        )
    out = np.zeros((jet_f.value.shape[0], jet_h.value.shape[1]), dtype=complex)
    for alpha in range(n):
        out += jet_f.dx[alpha] @ middle @ jet_h.dxi[alpha]
        out -= jet_f.dxi[alpha] @ middle @ jet_h.dx[alpha]
    return out


@dataclass(frozen=True)
class EigenJet:
    """Eigenvalues, projections and eigenvectors of a leading symbol at one
    point, together with their first derivatives in all phase-space
    directions.

    Arrays are indexed by sorted sheet position; ``sheets`` maps positions
    to signed labels.  Shapes: h (m,), dh_* (n, m), P (m, m, m),
    dP_* (n, m, m, m), v (m, m) rows, dv_* (n, m, m) rows.
    """

    point: PhasePoint
    step: float
    sheets: np.ndarray
    h: np.ndarray
    dh_x: np.ndarray
    dh_xi: np.ndarray
    P: np.ndarray
    dP_x: np.ndarray
    dP_xi: np.ndarray
    v: np.ndarray
    dv_x: np.ndarray
    dv_xi: np.ndarray
    gap: float

    @property
    def m(self) -> int:
        return self.h.size

    @property
    def m_plus(self) -> int:
        return int(np.sum(self.h > 0))

    def position(self, sheet: int) -> int:
        hits = np.nonzero(self.sheets == sheet)[0]
        if hits.size != 1:
            raise ValueError(f"no sheet {sheet}; labels are {self.sheets.tolist()}")
        return int(hits[0])

    def projection_jet(self, pos: int) -> MatrixJet:
        return MatrixJet(self.P[pos], self.dP_x[:, pos], self.dP_xi[:, pos])

    def vector_jet(self, pos: int) -> MatrixJet:
        """Column-vector jet of eigenvector ``pos`` (shape (m, 1))."""
        return MatrixJet(
            self.v[pos][:, None],
            self.dv_x[:, pos][:, :, None],
            self.dv_xi[:, pos][:, :, None],
        )

    def curvature_scalar(self, pos: int) -> complex:
        """tr {P, P, P} for one sheet (purely imaginary)."""
        jet = self.projection_jet(pos)
        acc = 0.0 + 0.0j
        for alpha in range(self.point.n):
            acc += np.trace(jet.dx[alpha] @ jet.value @ jet.dxi[alpha])
            acc -= np.trace(jet.dxi[alpha] @ jet.value @ jet.dx[alpha])
        return complex(acc)

    def vector_curvature_scalar(self, pos: int) -> complex:
        """{v^*, v} for one sheet (purely imaginary); equals -tr {P, P, P}."""
        vj = self.vector_jet(pos)
        acc = 0.0 + 0.0j
        for alpha in range(self.point.n):
            acc += (vj.dx[alpha].conj().T @ vj.dxi[alpha])[0, 0]
            acc -= (vj.dxi[alpha].conj().T @ vj.dx[alpha])[0, 0]
        return complex(acc)


def _align_phase(base: np.ndarray, pert: np.ndarray) -> np.ndarray:
    """Rotate each perturbed eigenvector to maximise Re <base, pert>."""
    out = pert.copy()
    for i in range(base.shape[1]):
        ov = np.vdot(base[:, i], pert[:, i])
        if abs(ov) < 0.5:
            raise GaugeAlignmentFailure(
                f"overlap {abs(ov):.3f} < 0.5 for sheet position {i}; "
                "step too large near an eigenvector rotation"
            )
        out[:, i] = pert[:, i] * (np.conj(ov) / abs(ov))
    return out


def eigen_jet(
    field: SymbolField,
    p: PhasePoint,
    step: float = DEFAULT_STEP,
    simplicity_tol: Optional[float] = None,
) -> EigenJet:
    """Eigen-decomposition with five-point central-difference derivatives.

    h and P are differentiated directly (both are phase-free); eigenvector
    stencils are phase-aligned to the base point first.  All sheets are
    returned.  Raises the eigen_decompose errors, plus
    :class:`GaugeAlignmentFailure` when an eigenvector rotates too fast
    across the stencil.
    """
    if field.degree != 1:
        raise ValueError("eigen jets are defined for degree-1 leading symbols")
    base = eigen_decompose(field(p), simplicity_tol)
    if simplicity_tol is None:
        simplicity_tol = DEFAULT_SIMPLICITY_FACTOR * float(np.max(np.abs(base.values)))
    n = p.n
    m = field.dim
    dh_x = np.zeros((n, m))
    dh_xi = np.zeros((n, m))
    dP_x = np.zeros((n, m, m, m), dtype=complex)
    dP_xi = np.zeros((n, m, m, m), dtype=complex)
    dv_x = np.zeros((n, m, m), dtype=complex)
    dv_xi = np.zeros((n, m, m), dtype=complex)
    for kind, h_step, dh_arr, dP_arr, dv_arr in (
        ("x", step, dh_x, dP_x, dv_x),
        ("xi", step * p.xi_norm, dh_xi, dP_xi, dv_xi),
    ):
        for axis in range(n):
            for off, w in zip(_OFFSETS, _WEIGHTS):
                sys = eigen_decompose(
                    field(p.shifted(kind, axis, off * h_step)), simplicity_tol
                )
                if not np.array_equal(sys.sheets, base.sheets):
                    raise DegenerateSpectrum(
                        "sheet signs changed across the difference stencil"
                    )
                aligned = _align_phase(base.vectors, sys.vectors)
                dh_arr[axis] += w * sys.values
                dP_arr[axis] += w * sys.projections
                dv_arr[axis] += w * aligned.T
            dh_arr[axis] /= h_step
            dP_arr[axis] /= h_step
            dv_arr[axis] /= h_step
    return EigenJet(
        point=p,
        step=step,
        sheets=base.sheets,
        h=base.values,
        dh_x=dh_x,
        dh_xi=dh_xi,
        P=base.projections,
        dP_x=dP_x,
        dP_xi=dP_xi,
        v=base.vectors.T.copy(),
        dv_x=dv_x,
        dv_xi=dv_xi,
        gap=base.gap,
    )


def check_field_contract(
    field: SymbolField,
    points: Sequence[PhasePoint],
    scales: Sequence[float] = (0.5, 2.0, 3.7),
    tol: float = 1e-9,
) -> None:
    """Verify Hermiticity and positive homogeneity on sample points.

    Raises :class:`NotHermitian` or ValueError on violation.  Used at model
    registration; cheap enough to run on dense sample grids.
    """
    for p in points:
        value = field(p)
        require_hermitian(value)
        for t in scales:
            scaled = field(PhasePoint(p.x, t * p.xi))
            expected = (t ** field.degree) * value
            err = np.max(np.abs(scaled - expected))
            if err > tol * max(1.0, np.max(np.abs(expected))):
                raise ValueError(
                    f"homogeneity defect {err:.3e} at scale {t} "
                    f"(degree {field.degree})"
                )

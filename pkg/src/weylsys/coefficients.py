"""Local Weyl coefficient densities from symbol data.

The leading coefficient is a phase-space volume: for each positive sheet,
the volume of the region where the sheet Hamiltonian is below one.  The
second coefficient adds three scalar integrand terms per sheet: the
next-order symbol sandwiched in the eigenvector, a bracket term built from
the leading symbol, and a curvature term built from the eigenprojection
alone.  Homogeneity reduces every region integral to a cosphere quadrature,
which for n = 2 is a plain periodic trapezoid rule (spectrally accurate).

Two algebraically equal forms exist for the bracket and curvature terms:
one through eigenvectors, one through projections.  The projection forms
are entirely gauge-free and serve as the production path; the eigenvector
forms are kept as a cross-check (`projection_form_check`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ComplexResidue, NotElliptic
from .symbols import (
    DEFAULT_STEP,
    EigenJet,
    PhasePoint,
    SymbolField,
    eigen_jet,
    generalized_bracket,
)

IMAG_RESIDUE_TOL = 1e-6


@dataclass(frozen=True)
class CosphereQuadrature:
    """Angular quadrature rule on the unit sphere of the cotangent fibre.

    For n = 2 a uniform angle grid with trapezoid weights; for n = 3 a
    Gauss-Legendre rule in the polar cosine crossed with a trapezoid in
    azimuth.  ``n_angles`` counts azimuthal nodes and must be >= 16, even.
    """

    n_angles: int = 256
    n_polar: int = 32

    def __post_init__(self):
        if self.n_angles < 16 or self.n_angles % 2 != 0:
            raise ValueError("n_angles must be an even integer >= 16")

    def nodes(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        """Unit vectors (rows) and weights integrating over the unit sphere."""
        if n == 2:
            theta = 2.0 * math.pi * np.arange(self.n_angles) / self.n_angles
            omega = np.stack([np.cos(theta), np.sin(theta)], axis=1)
            weights = np.full(self.n_angles, 2.0 * math.pi / self.n_angles)
            return omega, weights
        if n == 3:
            nodes_c, weights_c = np.polynomial.legendre.leggauss(self.n_polar)
            phi = 2.0 * math.pi * np.arange(self.n_angles) / self.n_angles
            w_phi = 2.0 * math.pi / self.n_angles
            sin_t = np.sqrt(1.0 - nodes_c ** 2)
            omega = np.empty((self.n_polar * self.n_angles, 3))
            weights = np.empty(self.n_polar * self.n_angles)
            idx = 0
            for c, wc in zip(nodes_c, weights_c):
                st = math.sqrt(1.0 - c * c)
                for p, ph in enumerate(phi):
                    omega[idx] = (st * math.cos(ph), st * math.sin(ph), c)
                    weights[idx] = wc * w_phi
                    idx += 1
            return omega, weights
        raise ValueError(f"cosphere quadrature implemented for n in {{2, 3}}, got {n}")


@dataclass(frozen=True)
class SheetTerms:
    """Pointwise scalar integrand data for one sheet at one cosphere node."""

    sheet: int
    h: float
    sub_vector: complex        # v^* A_next v
    sub_projection: complex    # tr(A_next P)
    bracket_vector: complex    # {v^*, A_lead - h, v}
    bracket_projection: complex  # tr {P, A_lead - h, P}
    curvature_projection: complex  # tr {P, P, P}
    curvature_vector: complex      # {v^*, v}


def sheet_terms_at(
    leading: SymbolField,
    nextorder: Optional[SymbolField],
    p: PhasePoint,
    step: float = DEFAULT_STEP,
    simplicity_tol: Optional[float] = None,
) -> tuple[EigenJet, list[SheetTerms]]:
    """Eigen-jet plus the per-sheet scalar integrand terms at one point."""
    jet = eigen_jet(leading, p, step, simplicity_tol)
    a_next = nextorder(p) if nextorder is not None else np.zeros(
        (leading.dim, leading.dim), dtype=complex
    )
    lead_val = leading(p)
    ident = np.eye(leading.dim)
    out = []
    for pos in range(jet.m):
        vj = jet.vector_jet(pos)
        vjh = vj.conjugate_transpose()
        pj = jet.projection_jet(pos)
        middle = lead_val - jet.h[pos] * ident
        v = jet.v[pos]
        out.append(
            SheetTerms(
                sheet=int(jet.sheets[pos]),
                h=float(jet.h[pos]),
                sub_vector=complex(np.conj(v) @ a_next @ v),
                sub_projection=complex(np.trace(a_next @ jet.P[pos])),
                bracket_vector=complex(generalized_bracket(vjh, middle, vj)[0, 0]),
                bracket_projection=complex(
                    np.trace(generalized_bracket(pj, middle, pj))
                ),
                curvature_projection=jet.curvature_scalar(pos),
                curvature_vector=jet.vector_curvature_scalar(pos),
            )
        )
    return jet, out


@dataclass(frozen=True)
class SheetGeometry:
    """Cosphere data for one sheet at a fixed base point x.

    ``volume`` is the phase-space volume of {radial Hamiltonian < 1} for
    this sheet (using |h| for negative sheets), ``surface`` the induced
    cosphere measure total, i.e. n * volume for the constant integrand.
    """

    sheet: int
    sign: int
    volume: float
    surface: float


@dataclass(frozen=True)
class SheetSecondTerms:
    """Region-integrated second-coefficient pieces for one sheet.

    ``c_first``/``c_second`` are the two angular factors (projection-form
    production values); the three ``term_*`` fields give the breakdown of
    this sheet's contribution to the second coefficient density, already
    carrying the dimensional prefactors.
    """

    sheet: int
    sign: int
    c_first: float
    c_second: float
    term_sub: float
    term_bracket: float
    term_curvature: float

    @property
    def total(self) -> float:
        return self.term_sub + self.term_bracket + self.term_curvature


@dataclass(frozen=True)
class WeylCoefficients:
    """Leading and second local coefficient densities at one point.

    ``breakdown`` maps each positive sheet label of the original operator
    to its :class:`SheetSecondTerms`; the minus-branch values come from the
    sign-flipped operator.
    """

    x: np.ndarray
    a_first_plus: float
    a_first_minus: float
    a_second_plus: float
    a_second_minus: float
    breakdown: dict = field(default_factory=dict)


def _sphere_scale_tol(
    leading: SymbolField, x: np.ndarray, omega: np.ndarray
) -> float:
    """Simplicity threshold calibrated to the field's scale on the sphere.

    A per-matrix relative threshold would let a uniformly tiny (hence
    degenerate) symbol through; the cosphere machinery therefore measures
    the global spectral radius over all nodes first.
    """
    from .symbols import DEFAULT_SIMPLICITY_FACTOR

    radius = 0.0
    for row in omega:
        mat = np.asarray(leading.evaluator(x, row), dtype=complex)
        vals = np.linalg.eigvalsh(0.5 * (mat + mat.conj().T))
        radius = max(radius, float(np.max(np.abs(vals))))
    return DEFAULT_SIMPLICITY_FACTOR * max(radius, 1e-300)


class CospherePanel:
    """Per-sheet integrand samples over the cosphere nodes at fixed x.

    Evaluates one eigen-jet per node, normalises each sheet by its radial
    Hamiltonian magnitude, and exposes region integrals of arbitrary
    per-sheet scalar samples.  Quadrature sums run through numpy's pairwise
    reduction in a fixed node order, so results are reproducible bit-for-bit
    for a given configuration.
    """

    def __init__(
        self,
        leading: SymbolField,
        nextorder: Optional[SymbolField],
        x: np.ndarray,
        quad: CosphereQuadrature,
        step: float = DEFAULT_STEP,
        simplicity_tol: Optional[float] = None,
    ):
        x = np.asarray(x, dtype=float)
        self.x = x
        self.n = x.size
        self.quad = quad
        omega, weights = quad.nodes(self.n)
        self.omega = omega
        self.weights = weights
        if simplicity_tol is None:
            simplicity_tol = _sphere_scale_tol(leading, x, omega)
        self.terms: list[list[SheetTerms]] = []
        jets = []
        for row in omega:
            jet, terms = sheet_terms_at(
                leading, nextorder, PhasePoint(x, row), step, simplicity_tol
            )
            jets.append(jet)
            self.terms.append(terms)
        self.sheets = jets[0].sheets.copy()
        for jet in jets:
            if not np.array_equal(jet.sheets, self.sheets):
                raise NotElliptic("sheet signature changed across the cosphere")
        self.h = np.array([[t.h for t in row] for row in self.terms])
        self.eta = np.abs(self.h)
        if np.min(self.eta) <= 0.0:
            raise NotElliptic("vanishing sheet Hamiltonian on the cosphere")

    def positions(self) -> range:
        return range(self.sheets.size)

    def region_integral(self, pos: int, samples: np.ndarray) -> complex:
        """Integral of a degree-0 scalar over {|h_sheet| < 1} from node samples."""
        eta = self.eta[:, pos]
        return np.sum(self.weights * samples * eta ** (-self.n)) / self.n

    def geometry(self, pos: int) -> SheetGeometry:
        vol = float(self.region_integral(pos, np.ones(len(self.weights))).real)
        return SheetGeometry(
            sheet=int(self.sheets[pos]),
            sign=1 if self.sheets[pos] > 0 else -1,
            volume=vol,
            surface=self.n * vol,
        )

    def second_terms(self, pos: int, form: str = "projection") -> SheetSecondTerms:
        """Region-integrated second-coefficient pieces for one sheet.

        ``form`` selects the projection-based (production) or
        eigenvector-based (cross-check) integrands.
        """
        n = self.n
        pref = n * (n - 1) / (2.0 * math.pi) ** n
        row = [t[pos] for t in self.terms]
        if form == "projection":
            sub = np.array([t.sub_projection for t in row])
            brack = np.array([t.bracket_projection for t in row])
            curv = np.array([t.curvature_projection for t in row])
        elif form == "vector":
            sub = np.array([t.sub_vector for t in row])
            brack = np.array([t.bracket_vector for t in row])
            curv = np.array([-t.curvature_vector for t in row])
        else:
            raise ValueError("form must be 'projection' or 'vector'")
        h = self.h[:, pos]
        int_sub = self.region_integral(pos, sub)
        int_brack = self.region_integral(pos, brack)
        int_curv = self.region_integral(pos, h * curv)
        term_sub = -pref * int_sub
        term_bracket = pref * 0.5j * int_brack
        term_curv = (n * 1j / (2.0 * math.pi) ** n) * int_curv
        c_first = -n * (n - 1) * (int_sub - 0.5j * int_brack)
        c_second = n * 1j * int_curv
        for name, val in (
            ("subprincipal", term_sub),
            ("bracket", term_bracket),
            ("curvature", term_curv),
            ("c_first", c_first),
            ("c_second", c_second),
        ):
            if abs(val.imag) > IMAG_RESIDUE_TOL * max(1.0, abs(val.real)):
                raise ComplexResidue(
                    f"{name} term has imaginary residue {val.imag:.3e}"
                )
        return SheetSecondTerms(
            sheet=int(self.sheets[pos]),
            sign=1 if self.sheets[pos] > 0 else -1,
            c_first=float(c_first.real),
            c_second=float(c_second.real),
            term_sub=float(term_sub.real),
            term_bracket=float(term_bracket.real),
            term_curvature=float(term_curv.real),
        )


def region_integral(
    leading: SymbolField,
    x: np.ndarray,
    sheet: int,
    integrand: Callable[[PhasePoint], float],
    quad: CosphereQuadrature,
    simplicity_tol: Optional[float] = None,
) -> float:
    """Integral of a degree-0 scalar over the region where one sheet
    Hamiltonian (its magnitude, for negative sheets) is below one.

    Homogeneity reduces the integral to (1/n) int_S q(x, w) |h(x, w)|^-n dw
    over the unit sphere.  Raises :class:`NotElliptic` if the sheet
    Hamiltonian degenerates at a quadrature node.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    omega, weights = quad.nodes(n)
    from .symbols import eigen_decompose

    if simplicity_tol is None:
        simplicity_tol = _sphere_scale_tol(leading, x, omega)
    acc = 0.0
    for row, w in zip(omega, weights):
        p = PhasePoint(x, row)
        sys = eigen_decompose(leading(p), simplicity_tol)
        pos = sys.position(sheet)
        eta = abs(sys.values[pos])
        acc += w * integrand(p) * eta ** (-n)
    return acc / n


def first_weyl(
    leading: SymbolField,
    x: np.ndarray,
    quad: CosphereQuadrature = CosphereQuadrature(),
    simplicity_tol: Optional[float] = None,
) -> float:
    """Leading local coefficient density: n (2 pi)^-n sum of positive-sheet
    region volumes.  Returns 0 when the leading symbol has no positive
    eigenvalues."""
    panel = CospherePanel(leading, None, x, quad, simplicity_tol=simplicity_tol)
    n = panel.n
    total = 0.0
    for pos in panel.positions():
        if panel.sheets[pos] > 0:
            total += panel.geometry(pos).volume
    return n / (2.0 * math.pi) ** n * total


@dataclass(frozen=True)
class SecondWeylResult:
    """Second coefficient density at one point with per-sheet breakdown."""

    value: float
    sheets: dict  # positive sheet label -> SheetSecondTerms


def second_weyl(
    leading: SymbolField,
    nextorder: Optional[SymbolField],
    x: np.ndarray,
    quad: CosphereQuadrature = CosphereQuadrature(),
    step: float = DEFAULT_STEP,
    simplicity_tol: Optional[float] = None,
    form: str = "projection",
) -> SecondWeylResult:
    """Second local coefficient density with per-term breakdown.

    Sums the subprincipal, bracket and curvature terms over positive
    sheets.  The production integrands are the gauge-free projection forms;
    pass form='vector' to use the eigenvector forms instead (cross-check).
    """
    panel = CospherePanel(leading, nextorder, x, quad, step, simplicity_tol)
    sheets = {}
    total = 0.0
    for pos in panel.positions():
        if panel.sheets[pos] > 0:
            terms = panel.second_terms(pos, form)
            sheets[terms.sheet] = terms
            total += terms.total
    return SecondWeylResult(total, sheets)


@dataclass(frozen=True)
class FormComparison:
    """Eigenvector-form vs projection-form values of the angular factors."""

    sheet: int
    c_first_vector: float
    c_first_projection: float
    c_second_vector: float
    c_second_projection: float


def projection_form_check(
    leading: SymbolField,
    nextorder: Optional[SymbolField],
    x: np.ndarray,
    sheet: int,
    quad: CosphereQuadrature = CosphereQuadrature(),
    step: float = DEFAULT_STEP,
) -> FormComparison:
    """Evaluate both algebraic forms of the two angular factors for one sheet."""
    panel = CospherePanel(leading, nextorder, x, quad, step)
    pos = int(np.nonzero(panel.sheets == sheet)[0][0])
    proj = panel.second_terms(pos, "projection")
    vect = panel.second_terms(pos, "vector")
    return FormComparison(
        sheet=sheet,
        c_first_vector=vect.c_first,
        c_first_projection=proj.c_first,
        c_second_vector=vect.c_second,
        c_second_projection=proj.c_second,
    )


def weyl_coefficients(
    leading: SymbolField,
    nextorder: Optional[SymbolField],
    x: np.ndarray,
    quad: CosphereQuadrature = CosphereQuadrature(),
    step: float = DEFAULT_STEP,
    simplicity_tol: Optional[float] = None,
) -> WeylCoefficients:
    """Both branches of the first and second coefficient densities at x.

    The minus branch is computed by applying the plus-branch formulas to
    the sign-flipped symbol pair.
    """
    x = np.asarray(x, dtype=float)
    second_plus = second_weyl(leading, nextorder, x, quad, step, simplicity_tol)
    flipped_lead = leading.flipped()
    flipped_next = nextorder.flipped() if nextorder is not None else None
    second_minus = second_weyl(flipped_lead, flipped_next, x, quad, step, simplicity_tol)
    return WeylCoefficients(
        x=x,
        a_first_plus=first_weyl(leading, x, quad, simplicity_tol),
        a_first_minus=first_weyl(flipped_lead, x, quad, simplicity_tol),
        a_second_plus=second_plus.value,
        a_second_minus=second_minus.value,
        breakdown=second_plus.sheets,
    )

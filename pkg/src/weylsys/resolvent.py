"""Resolvent-symbol route to the second coefficient.

An independent pipeline: expand the resolvent's symmetric-quantization
symbol in its two leading terms, take its matrix trace (which collapses to
a single sheet sum), weight with the power-difference kernels, and split
every phase-space integral into an angular factor times a universal radial
factor.  The radial factors have closed forms; the angular factors are the
same cosphere quadratures the direct route uses.  The two angle-resolved
coefficients b1, b0 then recover the second coefficient either from two
angles or from an extrapolated small-angle limit.

Negative sheets enter b0 with a radial factor proportional to the angle
itself, so they drop out of the small-angle limit; the two-angle inversion
removes them algebraically.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Mapping, Optional

import numpy as np
from scipy.integrate import quad

from .coefficients import CospherePanel, CosphereQuadrature
from .errors import (
    AngleOutOfRange,
    DegenerateAngles,
    QuadratureFailure,
    SingularResolvent,
)
from .kernels import kernel_moment_closed, power_difference_kernel
from .symbols import (
    DEFAULT_STEP,
    MatrixJet,
    PhasePoint,
    SymbolField,
    eigen_jet,
    generalized_bracket,
    symbol_jet,
)

RESOLVENT_DISTANCE_TOL = 1e-8


@dataclass(frozen=True)
class SpectralParameter:
    """z = lam * exp(i phi) with lam > 0 and 0 < phi < pi."""

    lam: float
    phi: float

    def __post_init__(self):
        if self.lam <= 0.0:
            raise ValueError(f"lam must be positive, got {self.lam}")
        if not 0.0 < self.phi < math.pi:
            raise AngleOutOfRange(f"phi must lie in (0, pi), got {self.phi}")

    @property
    def z(self) -> complex:
        return self.lam * cmath.exp(1j * self.phi)


def _resolvent_jet(lead_jet: MatrixJet, z: complex) -> MatrixJet:
    """Jet of (A - z)^-1 from the jet of A (exact matrix calculus)."""
    m = lead_jet.value.shape[0]
    res = np.linalg.inv(lead_jet.value - z * np.eye(m))
    dx = np.array([-res @ d @ res for d in lead_jet.dx])
    dxi = np.array([-res @ d @ res for d in lead_jet.dxi])
    return MatrixJet(res, dx, dxi)


def _check_distance(h: np.ndarray, z: complex) -> None:
    dist = float(np.min(np.abs(h - z)))
    if dist < RESOLVENT_DISTANCE_TOL:
        raise SingularResolvent(
            f"spectral parameter within {dist:.2e} of a sheet Hamiltonian"
        )


def resolvent_symbol(
    leading: SymbolField,
    nextorder: Optional[SymbolField],
    p: PhasePoint,
    z: complex,
    step: float = DEFAULT_STEP,
) -> np.ndarray:
    """Two leading terms of the resolvent's symmetric-quantization symbol.

    R - R A_next R + (i/2) {R, A - z, R} with R = (A - z)^-1, everything
    evaluated pointwise; the omitted remainder is one order lower in both
    the momentum and the spectral parameter.
    """
    lead_jet = symbol_jet(leading, p, step)
    h = np.linalg.eigvalsh(lead_jet.value)
    _check_distance(h, z)
    res_jet = _resolvent_jet(lead_jet, z)
    shifted = lead_jet.value - z * np.eye(leading.dim)
    out = res_jet.value.copy()
    if nextorder is not None:
        out -= res_jet.value @ nextorder(p) @ res_jet.value
    out += 0.5j * generalized_bracket(res_jet, shifted, res_jet)
    return out


@dataclass(frozen=True)
class ResolventSymbolTerms:
    """Scalar symbol terms of tr (A - z)^(1-n) for one sheet at one point.

    ``s_first`` is the leading term (h - z)^(1-n); ``s_second`` the
    next-order term, split into its pole-of-order-n part and its
    curvature part.
    """

    sheet: int
    s_first: complex
    s_second_pole: complex
    s_second_curvature: complex

    @property
    def s_second(self) -> complex:
        return self.s_second_pole + self.s_second_curvature


def _sheet_scalar_data(
    leading: SymbolField,
    nextorder: Optional[SymbolField],
    p: PhasePoint,
    step: float,
):
    """Per-sheet (h, tr(A_next P), tr{P, A-h, P}, tr{P,P,P}) at one point."""
    jet = eigen_jet(leading, p, step)
    a_next = nextorder(p) if nextorder is not None else np.zeros(
        (leading.dim, leading.dim), dtype=complex
    )
    lead_val = leading(p)
    ident = np.eye(leading.dim)
    rows = []
    for pos in range(jet.m):
        pj = jet.projection_jet(pos)
        middle = lead_val - jet.h[pos] * ident
        rows.append(
            (
                int(jet.sheets[pos]),
                float(jet.h[pos]),
                complex(np.trace(a_next @ jet.P[pos])),
                complex(np.trace(generalized_bracket(pj, middle, pj))),
                jet.curvature_scalar(pos),
            )
        )
    return rows


def resolvent_symbol_terms(
    leading: SymbolField,
    nextorder: Optional[SymbolField],
    p: PhasePoint,
    z: complex,
    n: int,
    step: float = DEFAULT_STEP,
) -> list[ResolventSymbolTerms]:
    """Per-sheet symbol terms of the traced (1-n)-th resolvent power."""
    rows = _sheet_scalar_data(leading, nextorder, p, step)
    _check_distance(np.array([r[1] for r in rows]), z)
    out = []
    for sheet, h, sub_tr, brack_tr, curv_tr in rows:
        pole = (-(n - 1) * sub_tr + 0.5j * (n - 1) * brack_tr) / (h - z) ** n
        curv = 1j * curv_tr / (h - z) ** (n - 1)
        out.append(
            ResolventSymbolTerms(
                sheet=sheet,
                s_first=(h - z) ** (1 - n),
                s_second_pole=pole,
                s_second_curvature=curv,
            )
        )
    return out


def trace_resolvent_symbol(
    leading: SymbolField,
    nextorder: Optional[SymbolField],
    p: PhasePoint,
    z: complex,
    step: float = DEFAULT_STEP,
) -> complex:
    """Single-sheet-sum form of the traced resolvent symbol (two terms)."""
    total = 0.0 + 0.0j
    for t in resolvent_symbol_terms(leading, nextorder, p, z, n=2, step=step):
        total += t.s_first + t.s_second
    return total


def power_trace_symbol(
    leading: SymbolField,
    nextorder: Optional[SymbolField],
    p: PhasePoint,
    z: complex,
    n: int,
    step: float = DEFAULT_STEP,
) -> complex:
    """Traced symbol of (A - z)^(1-n), two leading terms, n >= 2."""
    if n < 2:
        raise ValueError("power trace requires n >= 2")
    total = 0.0 + 0.0j
    for t in resolvent_symbol_terms(leading, nextorder, p, z, n=n, step=step):
        total += t.s_first + t.s_second
    return total


def cauchy_derivative(fn, z: complex, order: int, radius: float, n_nodes: int = 64) -> complex:
    """order-th derivative of fn at z via the Cauchy integral on a circle."""
    if order == 0:
        return fn(z)
    ks = np.arange(n_nodes)
    ws = np.exp(2j * math.pi * ks / n_nodes)
    vals = np.array([fn(z + radius * w) for w in ws])
    coeff = np.mean(vals * np.exp(-2j * math.pi * order * ks / n_nodes))
    return math.factorial(order) * coeff / radius ** order


def radial_factor(n: int, phi: float, sheet_sign: int) -> float:
    """Universal radial factor of the angle-resolved second coefficient.

    -2 (pi - phi) for positive sheets; the negative-sheet factor follows
    from the same closed moment form with the spectral parameter reflected
    through the origin and equals (-1)^n * 2 phi.  Both are independent of
    which of the two integrand splittings they multiply, and of n for
    positive sheets.
    """
    if not 0.0 < phi < math.pi:
        raise AngleOutOfRange(f"phi must lie in (0, pi), got {phi}")
    z = cmath.exp(1j * phi)
    if sheet_sign > 0:
        val = 1j * kernel_moment_closed(n, z, power=n - 1)
    else:
        val = 1j * (-1.0) ** n * kernel_moment_closed(n, -z, power=n - 1)
    if abs(val.imag) > 1e-12:
        raise QuadratureFailure("radial factor failed to come out real")
    return float(val.real)


def radial_profile(
    phi: float,
    n: int,
    k: int,
    cutoff: float = 400.0,
) -> float:
    """Numeric radial integral for positive sheets (test oracle).

    k = 1 integrates the order-n kernel against mu^(n-1); k = 2 the
    order-(n-1) kernel against mu^(n-2).  Both must equal -2 (pi - phi)
    independently of n.  Adaptive quadrature on [0, R] plus an inverted
    substitution on the tail; raises :class:`QuadratureFailure` when the
    error estimates are too large.
    """
    if not 0.0 < phi < math.pi:
        raise AngleOutOfRange(f"phi must lie in (0, pi), got {phi}")
    if k not in (1, 2):
        raise ValueError("k must be 1 or 2")
    z = cmath.exp(1j * phi)
    order = n if k == 1 else n - 1
    power = n - 1 if k == 1 else n - 2

    def integrand(mu: float) -> float:
        return power_difference_kernel(mu, z, order).imag * mu ** power

    val, err = quad(integrand, 0.0, cutoff, limit=600, epsabs=1e-12, epsrel=1e-11,
                    points=[1.0, 2.0])
    # Tail via mu = cutoff / u; integrand decays like mu^(power - order - 2).
    def tail_integrand(u: float) -> float:
        mu = cutoff / u
        return integrand(mu) * mu / u

    tval, terr = quad(tail_integrand, 0.0, 1.0, limit=200, epsabs=1e-12, epsrel=1e-10)
    if err + terr > 1e-7:
        raise QuadratureFailure(
            f"radial integral error estimate {err + terr:.2e} too large"
        )
    # The kernel is purely imaginary, so i * int(kernel) = -int(Im kernel).
    return -(val + tval)


@dataclass(frozen=True)
class SheetAngularData:
    """Angle-independent data for one sheet entering the b coefficients."""

    sheet: int
    sign: int
    surface: float   # total cosphere measure = n * region volume
    c_first: float
    c_second: float


@dataclass(frozen=True)
class BProfile:
    """Angle-resolved expansion coefficients at a fixed base point.

    The angular factors are computed once; evaluation at any angle applies
    the closed-form radial and kernel factors.
    """

    x: np.ndarray
    n: int
    data: list

    def b1(self, phi: float) -> float:
        if not 0.0 < phi < math.pi:
            raise AngleOutOfRange(f"phi must lie in (0, pi), got {phi}")
        z = cmath.exp(1j * phi)
        total = 0.0 + 0.0j
        n = self.n
        for d in self.data:
            if d.sign > 0:
                moment = kernel_moment_closed(n - 1, z, power=n - 1)
            else:
                moment = (-1.0) ** (n - 1) * kernel_moment_closed(n - 1, -z, power=n - 1)
            total += 1j * d.surface * moment
        value = total / (2.0 * math.pi) ** n
        return float(value.real)

    def b0_sheet(self, phi: float, sheet: int) -> float:
        for d in self.data:
            if d.sheet == sheet:
                return (d.c_first + d.c_second) * radial_factor(self.n, phi, d.sign)
        raise ValueError(f"no sheet {sheet}")

    def b0(self, phi: float) -> float:
        total = sum(self.b0_sheet(phi, d.sheet) for d in self.data)
        return total / (2.0 * math.pi) ** self.n


def b_profile(
    leading: SymbolField,
    nextorder: Optional[SymbolField],
    x: np.ndarray,
    quad_rule: CosphereQuadrature = CosphereQuadrature(),
    step: float = DEFAULT_STEP,
) -> BProfile:
    """Compute the angle-independent sheet data for the b coefficients."""
    panel = CospherePanel(leading, nextorder, x, quad_rule, step)
    data = []
    for pos in panel.positions():
        geo = panel.geometry(pos)
        terms = panel.second_terms(pos, "projection")
        data.append(
            SheetAngularData(
                sheet=geo.sheet,
                sign=geo.sign,
                surface=geo.surface,
                c_first=terms.c_first,
                c_second=terms.c_second,
            )
        )
    return BProfile(x=np.asarray(x, dtype=float), n=panel.n, data=data)


@dataclass(frozen=True)
class BCoefficients:
    """b1, b0 at one angle with the per-sheet split of b0."""

    phi: float
    b1: float
    b0: float
    b0_by_sheet: dict


def b_coefficients(
    leading: SymbolField,
    nextorder: Optional[SymbolField],
    x: np.ndarray,
    phi: float,
    quad_rule: CosphereQuadrature = CosphereQuadrature(),
    step: float = DEFAULT_STEP,
) -> BCoefficients:
    """Angle-resolved expansion coefficients at one angle.

    Computes the cosphere factors once and applies the closed-form radial
    factors.  The per-sheet b0 values are *not* divided by the (2 pi)^n
    normalisation of the total (they feed decay tests as-is).
    """
    prof = b_profile(leading, nextorder, x, quad_rule, step)
    by_sheet = {d.sheet: prof.b0_sheet(phi, d.sheet) for d in prof.data}
    return BCoefficients(
        phi=phi, b1=prof.b1(phi), b0=prof.b0(phi), b0_by_sheet=by_sheet
    )


def recover_second_weyl(
    b0_values: Mapping[float, float],
    method: str = "two-angle",
) -> float:
    """Invert angle-resolved b0 values to the plus-branch second coefficient.

    'two-angle' uses exactly two angles; 'limit' fits an affine model to a
    decreasing angle sequence and extrapolates to zero angle (exact for the
    affine dependence the expansion guarantees).  Raises
    :class:`DegenerateAngles` when the angles cannot separate the branches.
    """
    angles = sorted(b0_values)
    for a in angles:
        if not 0.0 < a < math.pi:
            raise AngleOutOfRange(f"angle {a} outside (0, pi)")
    if method == "two-angle":
        if len(angles) != 2:
            raise ValueError("two-angle recovery needs exactly two angles")
        p1, p2 = angles
        if abs(p2 - p1) < 1e-6:
            raise DegenerateAngles(f"angles {p1} and {p2} too close")
        return (p1 * b0_values[p2] - p2 * b0_values[p1]) / (
            2.0 * math.pi * (p2 - p1)
        )
    if method == "limit":
        if len(angles) < 2:
            raise ValueError("limit recovery needs at least two angles")
        if max(angles) - min(angles) < 1e-6:
            raise DegenerateAngles("angle spread too small for extrapolation")
        arr = np.array(angles)
        vals = np.array([b0_values[a] for a in angles])
        design = np.stack([np.ones_like(arr), arr], axis=1)
        coef, *_ = np.linalg.lstsq(design, vals, rcond=None)
        return -coef[0] / (2.0 * math.pi)
    raise ValueError("method must be 'two-angle' or 'limit'")

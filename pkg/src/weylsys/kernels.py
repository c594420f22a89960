"""Resolvent power-difference kernels and their closed-form moment integrals.

The recovery route weights the spectral measure with the family

    k_n(mu, z) = 2/(mu - z)^n - 1/(mu - 2z)^n - (complex conjugate terms),

a purely imaginary function of real mu for any non-real z.  The two moment
integrals int_0^inf k_n mu^n dmu and int_0^inf k_n mu^(n-1) dmu have closed
forms; the second one is evaluated with the complex argument taken in
[0, 2pi) (branch cut along the positive real axis), which is what makes the
positive and negative spectral branches separable.

The numeric moment evaluator is deliberately independent of the closed
forms: adaptive quadrature on [0, R] plus an analytic large-mu tail summed
from the kernel's asymptotic expansion.  It serves as the standing oracle
for the closed forms.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import comb

from .errors import AngleOutOfRange, QuadratureFailure, RealSpectralParameter


@dataclass(frozen=True)
class KernelSample:
    """One kernel evaluation; ``value`` is purely imaginary."""

    n: int
    mu: float
    z: complex
    value: complex


def kernel_sample(mu: float, z: complex, n: int) -> KernelSample:
    """Evaluate the kernel into a validated record."""
    value = power_difference_kernel(mu, z, n)
    if abs(value.real) > 1e-12 * max(1.0, abs(value)):
        raise ValueError(f"kernel value not purely imaginary: {value!r}")
    return KernelSample(n=n, mu=float(mu), z=complex(z), value=value)


def power_difference_kernel(mu, z: complex, n: int):
    """k_n(mu, z); accepts scalar or array mu.  Im z must be nonzero."""
    if n < 1:
        raise ValueError("kernel index must be >= 1")
    z = complex(z)
    if z.imag == 0.0:
        raise RealSpectralParameter("kernel undefined for real spectral parameter")
    mu = np.asarray(mu, dtype=float)
    w = 2.0 / (mu - z) ** n - 1.0 / (mu - 2 * z) ** n
    out = w - np.conj(w)
    return complex(out) if out.ndim == 0 else out


def arg_positive_cut(w: complex) -> float:
    """Argument of w in [0, 2pi), branch cut along the positive real axis."""
    a = cmath.phase(w)
    if a < 0.0:
        a += 2.0 * math.pi
    return a


def kernel_moment_closed(n: int, z: complex, power: int) -> complex:
    """Closed form of int_0^inf k_n(mu, z) mu^power dmu for power in {n, n-1}.

    power = n   ->  4 n i (ln 2) Im z
    power = n-1 ->  i pi (1 + sgn Im z) - i Arg(z^2),  Arg in [0, 2pi).
    """
    z = complex(z)
    if z.imag == 0.0:
        raise RealSpectralParameter("moment undefined for real spectral parameter")
    if power == n:
        return 4.0j * n * math.log(2.0) * z.imag
    if power == n - 1:
        sgn = 1.0 if z.imag > 0 else -1.0
        return 1j * math.pi * (1.0 + sgn) - 1j * arg_positive_cut(z * z)
    raise ValueError(f"power must be n or n-1, got {power} with n={n}")


def _tail_coefficients(z: complex, n: int, kmax: int) -> list[complex]:
    """Coefficients a_k of k_n(mu, z) ~ sum_k a_k mu^(-n-k) for large mu."""
    coeffs = []
    for k in range(kmax + 1):
        c = comb(n + k - 1, k, exact=True) * (2.0 - 2.0 ** k)
        coeffs.append(c * 2j * (z ** k).imag)
    return coeffs


def kernel_moment_numeric(
    n: int,
    z: complex,
    power: int,
    cutoff_factor: float = 50.0,
    tail_terms: int = 40,
    rel_tol: float = 1e-10,
) -> complex:
    """Numeric moment integral: adaptive quadrature on [0, R] + analytic tail.

    R = cutoff_factor * |z|.  The tail uses the large-mu expansion of the
    kernel; each term integrates in closed form.  Raises
    :class:`QuadratureFailure` if the adaptive rule reports a large error.
    """
    z = complex(z)
    if z.imag == 0.0:
        raise RealSpectralParameter("moment undefined for real spectral parameter")
    if power not in (n, n - 1):
        raise ValueError(f"power must be n or n-1, got {power} with n={n}")
    radius = cutoff_factor * abs(z)

    def integrand(mu: float) -> float:
        return power_difference_kernel(mu, z, n).imag * mu ** power

    val, err = quad(
        integrand, 0.0, radius, limit=400, epsabs=1e-12, epsrel=rel_tol,
        points=[abs(z), 2 * abs(z)],
    )
    if err > 1e-6 * max(1.0, abs(val)):
        raise QuadratureFailure(f"kernel moment error estimate {err:.2e} too large")
    # Tail: sum_k a_k int_R^inf mu^(power-n-k) dmu; exponent power-n-k <= -2
    # for k >= 2 (the k = 0, 1 coefficients vanish identically).
    tail = 0.0 + 0.0j
    for k, a_k in enumerate(_tail_coefficients(z, n, tail_terms)):
        expo = power - n - k
        if expo >= -1:
            if a_k != 0:
                raise QuadratureFailure("non-integrable tail term; bad power")
            continue
        term = a_k * (-(radius ** (expo + 1)) / (expo + 1))
        tail += term
        if abs(term) < 1e-16 * max(1.0, abs(val)) and k > 4:
            break
    return 1j * val + tail


def expansion_b_coefficients(
    a_first_plus: float,
    a_first_minus: float,
    a_second_plus: float,
    a_second_minus: float,
    n: int,
    phi: float,
) -> tuple[float, float]:
    """Closed forms of the two angle-resolved expansion coefficients.

    b1 = -4 (ln 2)(n-1)(sin phi) [a_first_plus + (-1)^n a_first_minus]
    b0 = -2 [(pi - phi) a_second_plus + (-1)^n phi a_second_minus]
    """
    if not 0.0 < phi < math.pi:
        raise AngleOutOfRange(f"phi must lie in (0, pi), got {phi}")
    sign = (-1.0) ** n
    b1 = -4.0 * math.log(2.0) * (n - 1) * math.sin(phi) * (
        a_first_plus + sign * a_first_minus
    )
    b0 = -2.0 * ((math.pi - phi) * a_second_plus + sign * phi * a_second_minus)
    return b1, b0

"""Two-term local spectral asymptotics for first-order elliptic systems.

Three independent pipelines at desk scale:

* ``coefficients`` -- the direct phase-space formulas for the first and
  second local coefficient densities,
* ``resolvent`` -- recovery of the same quantities from the traced
  resolvent symbol through angle-resolved expansion coefficients,
* ``torus`` -- ground truth: dense spectra of concrete systems on the flat
  two-torus, smoothed counting functions, and asymptotic fits.

``symbols`` holds the shared eigen-jet and bracket machinery, ``kernels``
the closed-form moment integrals behind the recovery route, and ``cli``
the command line front end.
"""

from .coefficients import (
    CosphereQuadrature,
    SecondWeylResult,
    WeylCoefficients,
    first_weyl,
    projection_form_check,
    region_integral,
    second_weyl,
    weyl_coefficients,
)
from .errors import WeylError
from .kernels import (
    expansion_b_coefficients,
    kernel_moment_closed,
    kernel_moment_numeric,
    power_difference_kernel,
)
from .resolvent import (
    BCoefficients,
    SpectralParameter,
    b_coefficients,
    b_profile,
    power_trace_symbol,
    radial_factor,
    radial_profile,
    recover_second_weyl,
    resolvent_symbol,
    resolvent_symbol_terms,
    trace_resolvent_symbol,
)
from .symbols import (
    EigenJet,
    MatrixJet,
    PhasePoint,
    SymbolField,
    eigen_decompose,
    eigen_jet,
    generalized_bracket,
    poisson_bracket,
    symbol_jet,
)
from .torus import (
    CountingSamples,
    Mollifier,
    SpectrumResult,
    TorusModel,
    assemble_and_solve,
    build_model,
    build_mollifier,
    catalog_names,
    default_mollifier,
    fit_weyl,
    local_counting_mollified,
)

__version__ = "0.1.0"

__all__ = [
    "BCoefficients",
    "CosphereQuadrature",
    "CountingSamples",
    "EigenJet",
    "MatrixJet",
    "Mollifier",
    "PhasePoint",
    "SecondWeylResult",
    "SpectralParameter",
    "SpectrumResult",
    "SymbolField",
    "TorusModel",
    "WeylCoefficients",
    "WeylError",
    "assemble_and_solve",
    "b_coefficients",
    "b_profile",
    "build_model",
    "build_mollifier",
    "catalog_names",
    "default_mollifier",
    "eigen_decompose",
    "eigen_jet",
    "expansion_b_coefficients",
    "first_weyl",
    "fit_weyl",
    "generalized_bracket",
    "kernel_moment_closed",
    "kernel_moment_numeric",
    "local_counting_mollified",
    "poisson_bracket",
    "power_difference_kernel",
    "power_trace_symbol",
    "projection_form_check",
    "radial_factor",
    "radial_profile",
    "recover_second_weyl",
    "region_integral",
    "resolvent_symbol",
    "resolvent_symbol_terms",
    "second_weyl",
    "symbol_jet",
    "trace_resolvent_symbol",
    "weyl_coefficients",
]

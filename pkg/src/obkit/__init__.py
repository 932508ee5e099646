"""Numerical toolkit for Orlicz-Besov seminorms and measure-density domains.

Modules: young (gauge algebra and admissibility integrals), geometry
(domains and density constants), quadrature (seeded integration engine),
norms (modulars, Luxemburg norms, fields), verify (inequality experiments),
cli (command-line front end).
"""

from .geometry import Domain, ball, box, cusp, polygon
from .norms import (
    ScalarField,
    besov_modular,
    besov_seminorm,
    constant,
    coordinate,
    cutoff,
    gagliardo_seminorm,
    gaussian,
    lebesgue_norm,
    orlicz_norm,
)
from .quadrature import QuadratureSpec
from .young import YoungFunction, admissible, convex_combine, power, powerlog

__version__ = "0.1.0"

"""Numerical sections, projections and measures of convex bodies, with inequality checkers."""

__version__ = "0.1.0"

from . import bodies, functionals, measures, quadrature  # noqa: E402
from .bodies import BodySpec  # noqa: E402
from .functionals import FunctionalValue  # noqa: E402
from .measures import MeasureSpec  # noqa: E402

__all__ = ["__version__", "bodies", "functionals", "measures", "quadrature", "BodySpec", "FunctionalValue",
           "MeasureSpec"]

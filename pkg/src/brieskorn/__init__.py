"""Exact Brieskorn and Petrov decompositions of semiquasihomogeneous
polynomial families and the Pfaffian Picard-Fuchs system of their Abelian
integrals."""

__version__ = "0.1.0"

from .poly import Poly, PolyRing, VarContext, WeightSystem, infer_weights, parse_poly  # noqa: E402
from .forms import KForm, parse_form, primitive, wedge, ext_d  # noqa: E402
from .local_algebra import LocalAlgebra, NonIsolatedSingularity, analyze, classify_simple  # noqa: E402
from .family import Family, make_family  # noqa: E402
from .division import divide_by_df, divide_by_dF, division_modulus  # noqa: E402
from .decompose import brieskorn_decompose, euler_divide, petrov_decompose  # noqa: E402
from .picard_fuchs import (PfaffianSystem, derive_pfaffian, logpole_check,  # noqa: E402
                           restrict_hypergeometric, spectrum_check)
from .numeric import CycleSpec, make_cycle, periods, pfaffian_residual  # noqa: E402

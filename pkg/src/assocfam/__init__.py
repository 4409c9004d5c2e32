"""assocfam: associate families of surfaces in 3-dimensional ambient spaces.

Extracts the geometric data of parametrized surfaces in homogeneous spaces
E(kappa, tau) and in warped products, checks their structure equations,
rotates them along generalized associate families and decides whether such
a family exists. See the README for a quickstart.
"""

import logging

from ._version import __version__
from .ambient import (
    AmbientSpace,
    HomogeneousSpace,
    WarpedProduct,
    WarpFunction,
    format_space,
    is_spaceform,
    parse_space,
)
from .catalog import CatalogEntry, get_entry, list_catalog, make_surface
from .compat import pointwise_residuals, residual_grid
from .exceptions import (
    AssocFamError,
    CaseViolation,
    ConfigError,
    ContractViolation,
    DegenerateImmersion,
    DomainError,
    ExtractionError,
    FamilyError,
    InternalError,
    LightlikeNormal,
    NoRealSolution,
    ParamOutOfRange,
    SignatureError,
    SuiteFailure,
    UmbilicalPoint,
    UnknownEntry,
)
from .family import (
    FamilyLaw,
    case_split,
    classify,
    obstruction_homogeneous,
    obstruction_warped,
    parse_law,
    sweep,
    verify_family,
)
from .jets import Jet2, jet_constant, jet_variable
from .models import (
    EquationResidual,
    FamilySweep,
    GridSpec,
    PointFailure,
    ResidualReport,
    Tolerances,
    Verdict,
)
from .surface import Immersion, SurfaceData, extract, sample_grid

logging.getLogger(__name__).addHandler(logging.NullHandler())

__all__ = [
    "__version__",
    "AmbientSpace",
    "HomogeneousSpace",
    "WarpedProduct",
    "WarpFunction",
    "parse_space",
    "format_space",
    "is_spaceform",
    "Jet2",
    "jet_variable",
    "jet_constant",
    "Immersion",
    "SurfaceData",
    "extract",
    "sample_grid",
    "residual_grid",
    "pointwise_residuals",
    "FamilyLaw",
    "parse_law",
    "verify_family",
    "sweep",
    "obstruction_homogeneous",
    "obstruction_warped",
    "case_split",
    "classify",
    "CatalogEntry",
    "make_surface",
    "list_catalog",
    "get_entry",
    "GridSpec",
    "Tolerances",
    "EquationResidual",
    "PointFailure",
    "ResidualReport",
    "FamilySweep",
    "Verdict",
    "AssocFamError",
    "ContractViolation",
    "DomainError",
    "InternalError",
    "ConfigError",
    "UnknownEntry",
    "ParamOutOfRange",
    "ExtractionError",
    "DegenerateImmersion",
    "SignatureError",
    "LightlikeNormal",
    "FamilyError",
    "NoRealSolution",
    "CaseViolation",
    "UmbilicalPoint",
    "SuiteFailure",
]

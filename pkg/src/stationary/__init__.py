"""Weierstrass data tools for stationary surfaces in 4-dimensional Lorentz space."""
from .cxratio import INF, MobiusTransform, Poly, RationalMap
from .nonorientable import check_involution, flux_vanishing_check, quotient_report, residue_vector
from .quadcurv import GaussMapCallable, QuadratureConfig, curvature_density, integrate_curvature
from .singscan import scan_singular_points
from .surface_mesh import DomainSpec, conformal_factor, export_obj, integrate_surface, loop_defect
from .vecform import (
    Vec4C,
    VectorForm,
    check_isotropy,
    laurent_normal_form,
    lorentz_dot,
    two_end_obstruction,
    xz_from_data,
)
from .weierstrass import (
    CATALOG_NAMES,
    WeierstrassData,
    catalog,
    check_periods,
    check_regularity,
    classify_end,
    total_curvature,
)

__version__ = "0.1.0"

__all__ = [
    "INF",
    "Poly",
    "RationalMap",
    "MobiusTransform",
    "WeierstrassData",
    "GaussMapCallable",
    "CATALOG_NAMES",
    "catalog",
    "check_regularity",
    "check_periods",
    "classify_end",
    "total_curvature",
    "check_involution",
    "residue_vector",
    "flux_vanishing_check",
    "quotient_report",
    "scan_singular_points",
    "QuadratureConfig",
    "curvature_density",
    "integrate_curvature",
    "Vec4C",
    "VectorForm",
    "lorentz_dot",
    "xz_from_data",
    "check_isotropy",
    "laurent_normal_form",
    "two_end_obstruction",
    "DomainSpec",
    "integrate_surface",
    "loop_defect",
    "conformal_factor",
    "export_obj",
]

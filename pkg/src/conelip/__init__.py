"""Lipschitz and positively homogeneous Lipschitz spaces on finite samples."""

__version__ = "0.1.0"

from .cone import (
    PHMap,
    RaySystem,
    ball_projection,
    cone_lip,
    lambda_inverse,
    lambda_restrict,
    odot,
    pair_sup,
    ph_eval,
    ph_mcshane_extend,
    ph_pairing,
    ph_pushforward,
    sphere_space,
)
from .elements import FreeElement, PHFreeElement
from .estimators import McShaneRegressor, PHMcShaneRegressor
from .free import (
    barycenter,
    eval_pairing,
    kr_norm,
    ph_norm,
    ph_norm_result,
    ph_quotient_check,
    phi,
    q_functional,
    quotient_dist_dual,
    quotient_dist_primal,
    theta,
)
from .mcshane import PartialField, is_extremal_sandwich, lp_extension, mcshane_inf, mcshane_sup
from .metric import PointedSpace, build_space, from_matrix, from_points, lip_const, restrict

__all__ = [n for n, v in list(globals().items()) if not n.startswith("_") and not hasattr(v, "__path__") and type(v).__name__ != "module"]

"""Truncated singular integrals on Lipschitz graphs, their variation and
oscillation, and a constructive Calderon-Zygmund decomposition."""
from __future__ import annotations

from .czdecomp import CZResult, cz_decompose, good_bad_split, verify_cz
from .errors import (ConfigError, ConstructionError, DegenerateResolutionError, DomainError,
                     HypothesisError, HypothesisWarning, ResolutionWarning, SingularityError)
from .geometry import GraphSpec, area_weight, eval_graph, phi_metric, split_hv, upsilon_map
from .kernels import KernelSpec, cauchy, eval_kernel, riesz
from .measures import Annulus, Ball, Cube, DiscreteMeasure, graph_measure
from .norms import StripFamily, lp_norm, strip_bmo_norm, strip_maximals, weak_l1_profile
from .operators import SMOOTHSTEP, FamilyValues, SmoothCutoff, TruncationGrid, family_eval, truncated
from .variation import oscillation, rho_variation, variation_field

__version__ = "0.1.0"

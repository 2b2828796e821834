"""normlab: exact computations in finite-dimensional normed spaces.

Norms given by closed forms or polytopes, dual norms and norming
functionals, induced operator norms, constructive norm-preserving
extension of functionals, and finitely supported measures on unit spheres.
"""
from .core import COMPLEX, REAL, FiniteSet, FnOnE, Functional, delta, l1_norm, linf_norm
from .duality import dual_norm, norming_functional, phi_embedding_check, polar_dual_spec
from .errors import NormLabError
from .hahn_banach import (PartialFunctional, Subspace, extend_functional,
                          extend_one_dimension, extend_vector_valued,
                          extend_with_certificate, minimal_bound)
from .lp import Constraint, LinearProgram, lp_solve
from .measures import (DiscreteMeasure, barycenter, canonicalize, dirac, integrate_scalar,
                       integrate_vector, is_nonnegative, multiply, tv_norm, weakstar_gap)
from .norms import (EllipsoidNorm, L1Norm, LinfNorm, LpNorm, NormSpec, PolyFacetNorm,
                    PolyVertexNorm, check_norm_axioms, eval_norm, normalize_to_sphere)
from .operators import (MapFromFunctions, MapToFunctions, opnorm_l1_to_V,
                        opnorm_V_to_linf)
from .optimize import maximize_over_ball

__version__ = "0.1.0"

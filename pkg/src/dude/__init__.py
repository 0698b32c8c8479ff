"""Stochastic-geometry analysis of downlink/uplink decoupled access in two-tier networks."""
__version__ = "0.1.0"

from .analytic import (case2_ccdf, case2_cdf, case2_distance_law, case2_mean_distance, case2_pdf,
                       laplace_functional, laplace_functional_exponent, spectral_efficiency_case2,
                       throughput_context, ul_throughput_case2)
from .association import (associate_drp, associate_dude, associate_many, case2_peak_density_ratio,
                          case_probabilities)
from .errors import (AlphaOutOfRange, Case2ProbabilityZero, ConfigError, DudeError, EmptyTier,
                     InfiniteCapacity, InsufficientCase2Samples, MaxDepthExceeded, MoreBSsThanDevices,
                     PowerOrdering, ScenarioError)
from .geometry import (GridSpec, auto_window, effective_intensity, interferer_intensity, matched_grid,
                       sample_deployment, sample_grid, thinning_probability)
from .model import (AssociationCase, CaseProbabilities, DeviceParams, Estimate, Scenario, SimWindow,
                    TierParams, make_scenario, validate_scenario)
from .montecarlo import (McConfig, estimate_case_probs_grid, estimate_case_probs_ppp,
                         estimate_spectral_efficiency_case2, sample_case2_distances)
from .quadrature import QuadSpec, integrate, interference_constant

"""Exposure-aware uplink design with a reconfigurable intelligent surface.

Builds RIS-assisted channel realizations, zero-forcing receivers and
minimum transmit powers, and minimizes the population exposure index over
the RIS phase shifts with dual gradient descent.
"""

from ris_emf.linalg import RankDeficient, Singular, col_row_outer, gram_inverse, pseudo_inverse
from ris_emf.scenario import (
    ChannelParams,
    ChannelSet,
    DimensionError,
    Geometry,
    UserProfile,
    DATA_USER,
    VOICE_USER,
    draw_profiles,
    pathloss_db,
    place_users,
    steering_vector,
    synthesize_channels,
)
from ris_emf.exposure import LengthMismatch, achieved_rates, exposure_index, rate_satisfaction
from ris_emf.zf_link import LinkState, dbm_to_watt, link_state, required_powers, sinr, zf_beamformer
from ris_emf.lagrangian import (
    Problem,
    WeightedProblem,
    build_weighted,
    grad_lambda,
    grad_theta,
    hessian_theta,
    lagrangian_value,
)
from ris_emf.optimizer import (
    OptimizerConfig,
    SolverState,
    baseline_phases,
    dual_gradient_descent,
    optimal_step,
    quantize_phases,
)

__version__ = "0.1.0"

"""Free rigid-body rotation in Lie-Poisson form, with inertia identification
from rotation-only observations."""

from .dataset import DatasetConfig, generate_dataset, load_dataset, load_observations, sample_initial_condition
from .dynamics import (
    BodyState,
    Trajectory,
    euler_rhs,
    propagate,
    quat_kinematics_rhs,
    reduced_hamiltonian,
    rk4_step,
)
from .identification import (
    IdentConfig,
    IdentResult,
    InertiaIdentifier,
    ObservationSet,
    fd_gradient,
    identify_inertia,
    latent_loss,
    pipeline_rollout,
)
from .inertia import (
    PRESETS,
    InertiaParams,
    StabilityReport,
    classify_equilibria,
    get_preset,
    inertia_from_density_grid,
    inertia_from_params,
    params_from_inertia,
)
from .so3 import (
    exp_so3,
    hat,
    log_so3,
    matrix_to_quat,
    project_to_s2s2,
    quat_to_matrix,
    random_rotation,
    random_unit_vector,
    rotation_to_s2s2,
    s2s2_to_rotation,
    so3_right_difference_distance,
    vee,
)
from .velocity import AngularVelocityEstimator, VelocityEstimate, estimate_body_angular_velocity

__version__ = "0.1.0"

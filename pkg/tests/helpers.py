import numpy as np

from rigidspin.dataset import sample_initial_condition, trajectory_rng
from rigidspin.dynamics import propagate_arrays
from rigidspin.identification import ObservationSet
from rigidspin.so3 import quat_to_matrix


def simulate_observations(J, n, steps=100, dt=1e-3, pi_norm=50.0, seed=0):
    """Rotation-only observations drawn the same way as a generated dataset."""
    states = [sample_initial_condition(trajectory_rng(seed, k), pi_norm) for k in range(n)]
    q0 = np.stack([s.q for s in states])
    pi0 = np.stack([s.pi for s in states])
    q, _ = propagate_arrays(q0, pi0, J, dt, steps)
    return ObservationSet(dt, list(np.swapaxes(quat_to_matrix(q), 0, 1)))


def relative_error(J, J_true):
    J_ref = 3.0 * J_true / np.trace(J_true)
    return float(np.linalg.norm(3.0 * J / np.trace(J) - J_ref) / np.linalg.norm(J_ref))

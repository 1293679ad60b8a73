"""Body angular velocity from two consecutive orientations."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .so3 import log_so3
from .validation import check_positive, check_rotation_sequences


class VelocityEstimate(NamedTuple):
    omega: np.ndarray
    branch: str  # "generic" | "zero-angle" | "pi-angle"


def estimate_body_angular_velocity(Rt, Rt1, dt) -> VelocityEstimate:
    """Constant body-frame angular velocity carrying ``Rt`` to ``Rt1`` in time ``dt``.

    The increment is taken in the body frame, ``Rt^T Rt1``, so that
    ``Rt1 = Rt @ exp_so3(dt * omega)`` is inverted exactly for ``|dt * omega| < pi``.
    For a half-turn increment the axis sign is arbitrary and ``branch`` says so.
    """
    check_positive("dt", dt)
    R_rel = np.asarray(Rt, dtype=float).T @ np.asarray(Rt1, dtype=float)
    aa = log_so3(R_rel)
    if aa.branch == "zero-angle":
        return VelocityEstimate(np.zeros(3), aa.branch)
    return VelocityEstimate((aa.angle / dt) * aa.axis, aa.branch)


def estimate_sequence_velocities(seq, dt):
    """Per-pair estimates along one sequence: ``(omega (L-1, 3), branches)``."""
    seq = np.asarray(seq, dtype=float)
    est = [estimate_body_angular_velocity(seq[i], seq[i + 1], dt) for i in range(len(seq) - 1)]
    if not est:
        return np.zeros((0, 3)), []
    return np.array([e.omega for e in est]), [e.branch for e in est]


class AngularVelocityEstimator(TransformerMixin, BaseEstimator):
    """Map rotation sequences ``(N, L, 3, 3)`` to body angular velocities ``(N, L-1, 3)``.

    Stateless; ``fit`` only validates its input.

    Parameters
    ----------
    dt : float
        Time between consecutive frames, in seconds.
    """

    def __init__(self, dt=1e-3):
        self.dt = dt

    def fit(self, X, y=None):
        check_positive("dt", self.dt)
        check_rotation_sequences(X)
        self.n_features_in_ = 9
        return self

    def transform(self, X):
        check_positive("dt", self.dt)
        seqs = check_rotation_sequences(X)
        out = [estimate_sequence_velocities(s, self.dt)[0] for s in seqs]
        if len({o.shape for o in out}) == 1:
            return np.stack(out)
        return out

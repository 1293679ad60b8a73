"""Free rigid-body rotation in reduced (Lie-Poisson) form.

The state is ``(q, pi)``: orientation quaternion and body angular momentum.
Momentum evolves by ``dpi/dt = pi x J^{-1} pi`` and orientation by
``dq/dt = 1/2 Q(omega) q`` with ``omega = J^{-1} pi``. Both are advanced
together with classical fixed-step RK4; the quaternion is renormalized after
each full step.

All array functions broadcast over leading batch axes, so a whole set of
trajectories can be propagated in one call.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .so3 import _quat_to_matrix_unchecked


@dataclass(frozen=True)
class BodyState:
    """Orientation ``q`` (``(..., 4)``, scalar last) and body momentum ``pi`` (``(..., 3)``)."""

    q: np.ndarray
    pi: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.q, dtype=float)
        pi = np.asarray(self.pi, dtype=float)
        if q.shape[-1] != 4 or pi.shape[-1] != 3 or q.shape[:-1] != pi.shape[:-1]:
            raise ValueError(f"inconsistent state shapes q{q.shape}, pi{pi.shape}")
        if np.any(np.abs(np.linalg.norm(q, axis=-1) - 1.0) > 1e-9):
            raise ValueError("state quaternion is not unit norm")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "pi", pi)

    @property
    def rotation(self) -> np.ndarray:
        return _quat_to_matrix_unchecked(self.q)


@dataclass(frozen=True)
class Trajectory:
    """States at times ``0, dt, ..., steps*dt``.

    ``q`` has shape ``(steps + 1, ..., 4)`` and ``pi`` ``(steps + 1, ..., 3)``.
    """

    dt: float
    q: np.ndarray
    pi: np.ndarray

    def __len__(self):
        return self.q.shape[0]

    def __getitem__(self, i) -> BodyState:
        return BodyState(self.q[i], self.pi[i])

    @property
    def states(self) -> list[BodyState]:
        return [self[i] for i in range(len(self))]

    @property
    def rotations(self) -> np.ndarray:
        return _quat_to_matrix_unchecked(self.q)

    @property
    def times(self) -> np.ndarray:
        return self.dt * np.arange(len(self))

    def omega(self, J) -> np.ndarray:
        return self.pi @ np.linalg.inv(np.asarray(J, dtype=float)).T


def reduced_hamiltonian(pi, J):
    """Rotational kinetic energy ``1/2 pi . J^{-1} pi``."""
    pi = np.asarray(pi, dtype=float)
    J = np.asarray(J, dtype=float)
    x = np.linalg.solve(J, pi[..., None])[..., 0]
    return 0.5 * np.sum(pi * x, axis=-1)


def euler_rhs(pi, J):
    pi = np.asarray(pi, dtype=float)
    omega = np.linalg.solve(np.asarray(J, dtype=float), pi[..., None])[..., 0]
    return np.cross(pi, omega)


def quat_kinematics_rhs(q, omega):
    """``1/2 Q(omega) q`` with ``Q = [[-hat(omega), omega], [-omega^T, 0]]``."""
    q = np.asarray(q, dtype=float)
    omega = np.asarray(omega, dtype=float)
    v, w = q[..., :3], q[..., 3:]
    dv = w * omega + np.cross(v, omega)
    dw = -np.sum(v * omega, axis=-1, keepdims=True)
    return 0.5 * np.concatenate([dv, dw], axis=-1)


def _cross(a, b):
    # np.cross has heavy per-call overhead on small trailing axes
    out = np.empty(np.broadcast_shapes(a.shape, b.shape))
    out[..., 0] = a[..., 1] * b[..., 2] - a[..., 2] * b[..., 1]
    out[..., 1] = a[..., 2] * b[..., 0] - a[..., 0] * b[..., 2]
    out[..., 2] = a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]
    return out


def _quat_rhs(q, omega):
    v, w = q[..., :3], q[..., 3:]
    out = np.empty(q.shape)
    out[..., :3] = 0.5 * (w * omega + _cross(v, omega))
    out[..., 3] = -0.5 * np.sum(v * omega, axis=-1)
    return out


def _vector_field(q, pi, Jinv):
    # Jinv is (3, 3) or a stack broadcastable against pi's batch axes
    omega = (Jinv @ pi[..., None])[..., 0]
    return _quat_rhs(q, omega), _cross(pi, omega)


def _rk4(q, pi, Jinv, dt):
    h = 0.5 * dt
    dq1, dp1 = _vector_field(q, pi, Jinv)
    dq2, dp2 = _vector_field(q + h * dq1, pi + h * dp1, Jinv)
    dq3, dp3 = _vector_field(q + h * dq2, pi + h * dp2, Jinv)
    dq4, dp4 = _vector_field(q + dt * dq3, pi + dt * dp3, Jinv)
    q = q + (dt / 6.0) * (dq1 + 2.0 * dq2 + 2.0 * dq3 + dq4)
    pi = pi + (dt / 6.0) * (dp1 + 2.0 * dp2 + 2.0 * dp3 + dp4)
    return q / np.linalg.norm(q, axis=-1, keepdims=True), pi


def _check_dt(dt):
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")


def rk4_step(state: BodyState, J, dt: float) -> BodyState:
    _check_dt(dt)
    Jinv = np.linalg.inv(np.asarray(J, dtype=float))
    q, pi = _rk4(state.q, state.pi, Jinv, dt)
    return BodyState(q, pi)


def propagate_arrays(q0, pi0, J, dt, steps):
    """Array-level :func:`propagate`; returns ``(q, pi)`` stacked along a new first axis."""
    _check_dt(dt)
    if steps < 0:
        raise ValueError("steps must be non-negative")
    Jinv = np.linalg.inv(np.asarray(J, dtype=float))
    q = np.asarray(q0, dtype=float)
    pi = np.asarray(pi0, dtype=float)
    qs = np.empty((steps + 1,) + q.shape)
    ps = np.empty((steps + 1,) + pi.shape)
    qs[0], ps[0] = q, pi
    for i in range(steps):
        q, pi = _rk4(q, pi, Jinv, dt)
        qs[i + 1], ps[i + 1] = q, pi
    return qs, ps


def propagate(state: BodyState, J, dt: float, steps: int) -> Trajectory:
    qs, ps = propagate_arrays(state.q, state.pi, J, dt, steps)
    return Trajectory(dt, qs, ps)


def conservation_drift(traj: Trajectory, J) -> tuple[float, float]:
    """Worst relative drift of energy and of ``|pi|`` along a trajectory (over all batch members)."""
    h = reduced_hamiltonian(traj.pi, J)
    c = np.linalg.norm(traj.pi, axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        dh = np.abs(h - h[0]) / np.abs(h[0])
        dc = np.abs(c - c[0]) / c[0]
    dh = np.where(np.isfinite(dh), dh, 0.0)
    dc = np.where(np.isfinite(dc), dc, 0.0)
    return float(np.max(dh)), float(np.max(dc))

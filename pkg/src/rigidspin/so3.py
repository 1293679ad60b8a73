"""Rotation representations and conversions on SO(3).

Quaternions are stored vector-first, scalar-last: ``[x, y, z, w]``. Rotation
matrices act on body-frame vectors to give inertial-frame vectors, so the
kinematics read ``dR/dt = R hat(omega)`` with ``omega`` in the body frame.

Most functions broadcast over leading axes (``(..., 3)``, ``(..., 4)``,
``(..., 3, 3)``); the ones documented as scalar take a single element.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .exceptions import DegeneratePair, NotRotation, NotSkew, NotUnit, ZeroVector

# ||R - I||_F below this is treated as the identity (rounding level of R^T R).
ANGLE_ZERO_TOL = 1e-12
# |theta - pi| below this switches to the column-of-(R + I) axis extraction.
ANGLE_PI_TOL = 1e-7
_TAYLOR_TOL = 1e-8
_DEFAULT_ZERO_AXIS = np.full(3, 1.0 / np.sqrt(3.0))


class AxisAngle(NamedTuple):
    axis: np.ndarray
    angle: float
    branch: str = "generic"  # "generic" | "zero-angle" | "pi-angle"

    @property
    def rotvec(self) -> np.ndarray:
        return self.angle * self.axis


class S2S2Pair(NamedTuple):
    u: np.ndarray
    v: np.ndarray


def hat(v):
    """Skew-symmetric matrix with ``hat(v) @ y == cross(v, y)``."""
    v = np.asarray(v, dtype=float)
    out = np.zeros(v.shape[:-1] + (3, 3))
    out[..., 0, 1] = -v[..., 2]
    out[..., 0, 2] = v[..., 1]
    out[..., 1, 0] = v[..., 2]
    out[..., 1, 2] = -v[..., 0]
    out[..., 2, 0] = -v[..., 1]
    out[..., 2, 1] = v[..., 0]
    return out


def vee(M, tol=1e-9):
    """Inverse of :func:`hat`. Raises :class:`NotSkew` if ``||M + M^T||_F > tol``."""
    M = np.asarray(M, dtype=float)
    asym = np.linalg.norm(M + np.swapaxes(M, -1, -2), axis=(-2, -1))
    if np.any(asym > tol):
        raise NotSkew(f"matrix is not skew-symmetric: ||M + M^T||_F = {np.max(asym):.3g}")
    return _vee_unchecked(M)


def _vee_unchecked(M):
    return np.stack([M[..., 2, 1], M[..., 0, 2], M[..., 1, 0]], axis=-1)


def _skew_part_vector(R):
    # vee((R - R^T) / 2) == sin(theta) * axis
    return 0.5 * np.stack(
        [R[..., 2, 1] - R[..., 1, 2], R[..., 0, 2] - R[..., 2, 0], R[..., 1, 0] - R[..., 0, 1]],
        axis=-1,
    )


def is_rotation(R, tol=1e-9) -> bool:
    R = np.asarray(R, dtype=float)
    if R.shape[-2:] != (3, 3) or not np.all(np.isfinite(R)):
        return False
    eye = np.eye(3)
    ortho = np.linalg.norm(np.swapaxes(R, -1, -2) @ R - eye, axis=(-2, -1))
    det = np.linalg.det(R)
    return bool(np.all(ortho <= tol) and np.all(np.abs(det - 1.0) <= tol))


def check_rotation(R, tol=1e-9):
    """Return ``R`` as a float array, raising :class:`NotRotation` if it is not in SO(3)."""
    R = np.asarray(R, dtype=float)
    if not is_rotation(R, tol):
        raise NotRotation("input is not a rotation matrix (R^T R != I or det(R) != 1)")
    return R


def s2s2_to_rotation(u, v) -> np.ndarray:
    """Map two non-parallel unit vectors to the rotation with columns ``(u, w2, u x w2)``.

    ``w2`` is ``v`` with its ``u`` component removed (Gram-Schmidt), then normalized.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    d = float(u @ v)
    if abs(d) >= 1.0 - 1e-9:
        raise DegeneratePair(f"u and v are nearly parallel (<u, v> = {d:.12g})")
    w1 = u / np.linalg.norm(u)
    w2 = v - w1 * (w1 @ v)
    w2 = w2 / np.linalg.norm(w2)
    w3 = np.cross(w1, w2)
    return np.column_stack([w1, w2, w3])


def rotation_to_s2s2(R) -> S2S2Pair:
    """Right inverse of :func:`s2s2_to_rotation`: the first two columns of ``R``."""
    R = np.asarray(R, dtype=float)
    return S2S2Pair(R[:, 0].copy(), R[:, 1].copy())


def project_to_s2s2(z) -> S2S2Pair:
    z = np.asarray(z, dtype=float)
    if z.shape != (6,):
        raise ValueError(f"expected a 6-vector, got shape {z.shape}")
    a, b = z[:3], z[3:]
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na <= 1e-12 or nb <= 1e-12:
        raise ZeroVector("both halves of z must be nonzero")
    return S2S2Pair(a / na, b / nb)


def quat_to_matrix(q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    norm = np.linalg.norm(q, axis=-1)
    if np.any(np.abs(norm - 1.0) > 1e-6):
        raise NotUnit(f"quaternion norm deviates from 1 by {np.max(np.abs(norm - 1.0)):.3g}")
    return _quat_to_matrix_unchecked(q)


def _quat_to_matrix_unchecked(q):
    x, y, z, w = q[..., 0], q[..., 1], q[..., 2], q[..., 3]
    xx, yy, zz = x * x, y * y, z * z
    xy, xz, yz = x * y, x * z, y * z
    wx, wy, wz = w * x, w * y, w * z
    out = np.empty(q.shape[:-1] + (3, 3))
    out[..., 0, 0] = 1.0 - 2.0 * (yy + zz)
    out[..., 0, 1] = 2.0 * (xy - wz)
    out[..., 0, 2] = 2.0 * (xz + wy)
    out[..., 1, 0] = 2.0 * (xy + wz)
    out[..., 1, 1] = 1.0 - 2.0 * (xx + zz)
    out[..., 1, 2] = 2.0 * (yz - wx)
    out[..., 2, 0] = 2.0 * (xz - wy)
    out[..., 2, 1] = 2.0 * (yz + wx)
    out[..., 2, 2] = 1.0 - 2.0 * (xx + yy)
    return out


def matrix_to_quat(R) -> np.ndarray:
    """Rotation matrix to unit quaternion via Shepperd's method (Markley's variant).

    Picks whichever of ``trace, R00, R11, R22`` is largest so the component
    that gets divided by is never small, builds the matching unnormalized
    quaternion and normalizes it. The result has ``w >= 0``.
    """
    R = np.asarray(R, dtype=float)
    tr = np.trace(R, axis1=-2, axis2=-1)
    r00, r11, r22 = R[..., 0, 0], R[..., 1, 1], R[..., 2, 2]
    # one candidate per branch, each row proportional to [x, y, z, w]
    cand = np.stack(
        [
            np.stack([R[..., 2, 1] - R[..., 1, 2], R[..., 0, 2] - R[..., 2, 0],
                      R[..., 1, 0] - R[..., 0, 1], 1.0 + tr], axis=-1),
            np.stack([1.0 + 2.0 * r00 - tr, R[..., 0, 1] + R[..., 1, 0],
                      R[..., 0, 2] + R[..., 2, 0], R[..., 2, 1] - R[..., 1, 2]], axis=-1),
            np.stack([R[..., 0, 1] + R[..., 1, 0], 1.0 + 2.0 * r11 - tr,
                      R[..., 1, 2] + R[..., 2, 1], R[..., 0, 2] - R[..., 2, 0]], axis=-1),
            np.stack([R[..., 0, 2] + R[..., 2, 0], R[..., 1, 2] + R[..., 2, 1],
                      1.0 + 2.0 * r22 - tr, R[..., 1, 0] - R[..., 0, 1]], axis=-1),
        ],
        axis=-2,
    )
    branch = np.argmax(np.stack([tr, r00, r11, r22], axis=-1), axis=-1)
    q = np.take_along_axis(cand, branch[..., None, None], axis=-2)[..., 0, :]
    q = q / np.linalg.norm(q, axis=-1, keepdims=True)
    return np.where(q[..., 3:4] < 0.0, -q, q)


def exp_so3(v) -> np.ndarray:
    """Rodrigues' formula, with a Taylor expansion of the coefficients for tiny angles."""
    v = np.asarray(v, dtype=float)
    theta = np.linalg.norm(v, axis=-1)
    small = theta < _TAYLOR_TOL
    safe = np.where(small, 1.0, theta)
    t2 = theta * theta
    a = np.where(small, 1.0 - t2 / 6.0, np.sin(safe) / safe)
    b = np.where(small, 0.5 - t2 / 24.0, (1.0 - np.cos(safe)) / (safe * safe))
    K = hat(v)
    return np.eye(3) + a[..., None, None] * K + b[..., None, None] * (K @ K)


def log_so3(R) -> AxisAngle:
    """Axis-angle of a single rotation matrix, with ``angle`` in ``[0, pi]``.

    The angle comes from ``atan2(sin, cos)`` rather than ``arccos`` so that it
    stays accurate for small rotations. At the identity the axis is the
    conventional ``(1, 1, 1)/sqrt(3)``. Within ``ANGLE_PI_TOL`` of a half turn
    the axis is read off the first column of ``R + I`` whose norm exceeds 0.1;
    its sign is arbitrary there.
    """
    R = np.asarray(R, dtype=float)
    if R.shape != (3, 3):
        raise ValueError(f"log_so3 takes a single 3x3 matrix, got shape {R.shape}")
    if np.linalg.norm(R - np.eye(3)) <= ANGLE_ZERO_TOL:
        return AxisAngle(_DEFAULT_ZERO_AXIS.copy(), 0.0, "zero-angle")

    s = _skew_part_vector(R)
    sin_t = float(np.linalg.norm(s))
    cos_t = 0.5 * (float(np.trace(R)) - 1.0)
    theta = float(np.arctan2(sin_t, cos_t))

    if np.pi - theta <= ANGLE_PI_TOL:
        cols = R + np.eye(3)
        norms = np.linalg.norm(cols, axis=0)
        j = int(np.flatnonzero(norms > 0.1)[0])
        return AxisAngle(cols[:, j] / norms[j], theta, "pi-angle")

    if cos_t < 0.0:
        # sin(theta) is small here; (R + R^T)/2 - cos(theta) I = (1 - cos) a a^T is not
        B = 0.5 * (R + R.T) - cos_t * np.eye(3)
        j = int(np.argmax(np.diag(B)))
        axis = B[:, j] / np.linalg.norm(B[:, j])
        if axis @ s < 0.0:
            axis = -axis
    else:
        axis = s / sin_t
    return AxisAngle(axis, theta, "generic")


def log_so3_vec(R) -> np.ndarray:
    """Rotation vector ``angle * axis``; zero at the identity."""
    aa = log_so3(R)
    return aa.angle * aa.axis


def so3_right_difference_distance(Ra, Rb):
    """``||I - Ra^T Rb||_F^2``; broadcasts over leading axes."""
    Ra = np.asarray(Ra, dtype=float)
    Rb = np.asarray(Rb, dtype=float)
    D = np.eye(3) - np.swapaxes(Ra, -1, -2) @ Rb
    return np.sum(D * D, axis=(-2, -1))


def random_unit_vector(rng: np.random.Generator) -> np.ndarray:
    x = rng.standard_normal(3)
    return x / np.linalg.norm(x)


def random_quaternion(rng: np.random.Generator) -> np.ndarray:
    q = rng.standard_normal(4)
    return q / np.linalg.norm(q)


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    """Haar-uniform rotation from a normalized 4-vector of standard normals."""
    return _quat_to_matrix_unchecked(random_quaternion(rng))

"""Moment-of-inertia matrices: presets, Cholesky parameterization, quadrature and
principal-axis stability."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DegenerateSpectrum, EmptyBody, NotCenterOfMass, NotSPD

# Values as tabulated for the benchmark bodies. J2 is printed with an indefinite
# matrix (eigenvalues approx -0.97, 0.17, 1.31); it is kept verbatim and flagged
# by ``check_inertia``.
PRESETS: dict[str, np.ndarray] = {
    "J0": np.eye(3) / 3.0,
    "J1": np.diag([0.42, 1.41, 1.67]),
    "J2": np.array([[0.17, 0.0, -0.56], [0.0, 0.17, -0.99], [-0.56, -0.99, 0.17]]),
    "J3": np.array([[0.47, 0.0, -0.28], [0.0, 1.61, -0.49], [-0.28, -0.49, 1.83]]),
    "J4": np.diag([0.33, 0.50, 1.0]),
    "J5": np.diag([0.33, 0.50, 1.0]),
}

PRESET_ALIASES = {
    "uniform-cube": "J0",
    "uniform-prism": "J1",
    "nonuniform-cube": "J2",
    "nonuniform-prism": "J3",
    "calipso": "J4",
    "cloudsat": "J5",
}

# Tabulated inverse matrices (two-decimal print).
PRESET_INVERSES: dict[str, np.ndarray] = {
    "J0": 3.0 * np.eye(3),
    "J1": np.diag([2.40, 0.71, 0.60]),
    "J2": np.array([[4.53, -2.62, -0.44], [-2.62, 1.34, -0.78], [-0.44, -0.78, -0.13]]),
    "J3": np.array([[2.37, 0.12, 0.39], [0.12, 0.68, 0.20], [0.39, 0.20, 0.66]]),
    "J4": np.diag([3.0, 2.0, 1.0]),
    "J5": np.diag([3.0, 2.0, 1.0]),
}

_STANDARD_BASIS = np.eye(3)
_SKEWED_AXES = np.array([[-0.35, -0.62, -0.71], [-0.87, 0.49, 0.0], [-0.35, -0.62, 0.71]])

# Tabulated principal axes, one per row. The J2 and J3 rows are printed
# identically; they are eigenvectors of the printed J2 (to two decimals).
PRESET_AXES: dict[str, np.ndarray] = {
    "J0": _STANDARD_BASIS,
    "J1": _STANDARD_BASIS,
    "J2": _SKEWED_AXES,
    "J3": _SKEWED_AXES,
    "J4": _STANDARD_BASIS,
    "J5": _STANDARD_BASIS,
}

_LOWER = ([1, 2, 2], [0, 0, 1])


def preset_name(name: str) -> str:
    key = PRESET_ALIASES.get(name.lower(), name.upper())
    if key not in PRESETS:
        known = ", ".join(list(PRESETS) + list(PRESET_ALIASES))
        raise KeyError(f"unknown inertia preset {name!r} (known: {known})")
    return key


def get_preset(name: str) -> np.ndarray:
    """Copy of a tabulated inertia matrix, by name ("J0".."J5") or alias."""
    return PRESETS[preset_name(name)].copy()


def check_inertia(J, require_pd=True) -> np.ndarray:
    """Validate a 3x3 inertia matrix: finite, symmetric, and (optionally) positive definite."""
    J = np.asarray(J, dtype=float)
    if J.shape != (3, 3) or not np.all(np.isfinite(J)):
        raise NotSPD(f"inertia must be a finite 3x3 matrix, got shape {J.shape}")
    if np.linalg.norm(J - J.T) > 1e-12 * max(1.0, np.linalg.norm(J)):
        raise NotSPD("inertia matrix is not symmetric")
    if require_pd:
        try:
            np.linalg.cholesky(J)
        except np.linalg.LinAlgError:
            w = np.linalg.eigvalsh(J)
            raise NotSPD(f"inertia matrix is not positive definite (eigenvalues {w})") from None
    return J


@dataclass(frozen=True)
class InertiaParams:
    """Unconstrained parameters of ``J = L L^T``.

    ``phi1`` holds the logs of the diagonal of ``L``; ``phi2`` holds the
    strictly-lower entries ``(L10, L20, L21)``.
    """

    phi1: np.ndarray
    phi2: np.ndarray

    def __post_init__(self):
        phi1 = np.array(self.phi1, dtype=float).reshape(3)
        phi2 = np.array(self.phi2, dtype=float).reshape(3)
        if not (np.all(np.isfinite(phi1)) and np.all(np.isfinite(phi2))):
            raise ValueError("inertia parameters must be finite")
        object.__setattr__(self, "phi1", phi1)
        object.__setattr__(self, "phi2", phi2)

    @classmethod
    def from_vector(cls, x) -> "InertiaParams":
        x = np.asarray(x, dtype=float)
        return cls(x[:3], x[3:6])

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.phi1, self.phi2])


def cholesky_factor(params: InertiaParams) -> np.ndarray:
    L = np.diag(np.exp(params.phi1))
    L[_LOWER] = params.phi2
    return L


def inertia_from_params(params: InertiaParams) -> np.ndarray:
    """``J = L L^T`` with ``diag(L) = exp(phi1)``; positive definite for any finite input."""
    L = cholesky_factor(params)
    return L @ L.T


def params_from_inertia(J) -> InertiaParams:
    J = check_inertia(J)
    L = np.linalg.cholesky(J)
    return InertiaParams(np.log(np.diag(L)), L[_LOWER])


def center_of_mass(positions, masses) -> np.ndarray:
    r = np.asarray(positions, dtype=float).reshape(-1, 3)
    m = np.asarray(masses, dtype=float).reshape(-1)
    total = m.sum()
    if r.shape[0] == 0 or total <= 0.0:
        raise EmptyBody("body has no mass")
    return (m[:, None] * r).sum(axis=0) / total


@dataclass(frozen=True)
class GridInertia:
    J: np.ndarray
    positive_definite: bool


def inertia_from_density_grid(positions, masses) -> GridInertia:
    """Point-mass quadrature of ``sum_i m_i (|r_i|^2 I - r_i r_i^T)``.

    Positions must already be centered on the center of mass (see
    :func:`center_of_mass`); this is checked, not corrected.
    """
    r = np.asarray(positions, dtype=float).reshape(-1, 3)
    m = np.asarray(masses, dtype=float).reshape(-1)
    if r.shape[0] != m.shape[0]:
        raise ValueError("positions and masses have different lengths")
    total = m.sum()
    if r.shape[0] == 0 or total <= 0.0:
        raise EmptyBody("body has no mass")
    first_moment = (m[:, None] * r).sum(axis=0)
    if np.linalg.norm(first_moment) > 1e-9 * total:
        raise NotCenterOfMass(
            f"positions are not centered: sum(m r) = {first_moment} (use center_of_mass to shift)"
        )
    r2 = np.einsum("ij,ij->i", r, r)
    J = np.eye(3) * np.dot(m, r2) - np.einsum("i,ij,ik->jk", m, r, r)
    J = 0.5 * (J + J.T)
    w = np.linalg.eigvalsh(J)
    return GridInertia(J, bool(w[0] > 1e-12 * max(w[-1], 1e-300)))


def principal_decomposition(J):
    """Principal moments (ascending) and axes (rows) of a symmetric matrix."""
    J = check_inertia(J, require_pd=False)
    w, V = np.linalg.eigh(J)
    return w, V.T.copy()


STABILITY_LABELS = ("stable-long", "unstable-intermediate", "stable-short")


@dataclass(frozen=True)
class StabilityReport:
    principal_moments: np.ndarray
    principal_axes: np.ndarray
    axis_labels: tuple[str, str, str] = STABILITY_LABELS


def classify_equilibria(J) -> StabilityReport:
    """Label steady spins about each principal axis.

    Smallest moment is the long axis, largest the short axis; spin about either
    is stable, spin about the intermediate one is not. Bodies with repeated
    moments have no well-defined labels and raise :class:`DegenerateSpectrum`.
    """
    J = check_inertia(J)
    w, axes = principal_decomposition(J)
    gaps = np.diff(w) / w[-1]
    if np.any(gaps <= 1e-9):
        raise DegenerateSpectrum(f"principal moments are not distinct: {w}")
    return StabilityReport(w, axes)

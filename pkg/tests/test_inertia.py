import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from rigidspin.exceptions import DegenerateSpectrum, EmptyBody, NotCenterOfMass, NotSPD
from rigidspin.inertia import (
    PRESET_ALIASES,
    PRESETS,
    InertiaParams,
    center_of_mass,
    check_inertia,
    cholesky_factor,
    classify_equilibria,
    get_preset,
    inertia_from_density_grid,
    inertia_from_params,
    params_from_inertia,
    principal_decomposition,
)


def brute_force_inertia(points, masses):
    J = np.zeros((3, 3))
    for r, m in zip(points, masses):
        for i in range(3):
            for j in range(3):
                J[i, j] += m * ((r @ r) * (i == j) - r[i] * r[j])
    return J


def test_zero_params_give_identity():
    assert np.array_equal(inertia_from_params(InertiaParams(np.zeros(3), np.zeros(3))), np.eye(3))


def test_diagonal_params():
    a, b, c = 0.5, 2.0, 3.0
    J = inertia_from_params(InertiaParams(np.log([a, b, c]), np.zeros(3)))
    assert np.allclose(J, np.diag([a * a, b * b, c * c]), rtol=1e-15)


def test_params_reproduce_j3():
    J3 = get_preset("J3")
    L = np.linalg.cholesky(J3)
    p = InertiaParams(np.log(np.diag(L)), [L[1, 0], L[2, 0], L[2, 1]])
    assert np.abs(inertia_from_params(p) - J3).max() <= 1e-8
    assert np.allclose(params_from_inertia(J3).to_vector(), p.to_vector(), atol=1e-14)


def test_params_from_identity_and_j1():
    assert np.array_equal(params_from_inertia(np.eye(3)).to_vector(), np.zeros(6))
    p = params_from_inertia(get_preset("J1"))
    assert np.array_equal(p.phi2, np.zeros(3))
    assert np.allclose(p.phi1, np.log(np.sqrt([0.42, 1.41, 1.67])), rtol=1e-14)


def test_params_from_indefinite_rejected():
    with pytest.raises(NotSPD):
        params_from_inertia(np.diag([1.0, -1.0, 2.0]))


@given(arrays(np.float64, 6, elements=st.floats(-3, 3)))
def test_any_params_give_spd(x):
    J = inertia_from_params(InertiaParams.from_vector(x))
    assert np.linalg.norm(J - J.T) <= 1e-12
    L = cholesky_factor(InertiaParams.from_vector(x))
    assert np.allclose(np.linalg.cholesky(J), L, rtol=1e-8, atol=1e-10)
    assert np.allclose(params_from_inertia(J).to_vector(), x, atol=1e-6)


def test_params_reject_non_finite():
    with pytest.raises(ValueError):
        InertiaParams([np.nan, 0, 0], [0, 0, 0])


def test_cube_corners():
    pts = np.array([[x, y, z] for x in (-0.5, 0.5) for y in (-0.5, 0.5) for z in (-0.5, 0.5)])
    m = np.ones(8)
    g = inertia_from_density_grid(pts, m)
    assert np.allclose(g.J, brute_force_inertia(pts, m), atol=1e-14)
    assert np.allclose(g.J, 4.0 * np.eye(3))
    assert g.positive_definite


def test_voxel_cube_approaches_j0():
    n = 64
    c = (np.arange(n) + 0.5) / n - 0.5
    X, Y, Z = np.meshgrid(c, c, c, indexing="ij")
    pts = np.stack([X.ravel(), Y.ravel(), Z.ravel()], axis=1)
    m = np.full(len(pts), 2.0 / len(pts))
    J = inertia_from_density_grid(pts, m).J
    assert np.linalg.norm(J - get_preset("J0")) / np.linalg.norm(get_preset("J0")) <= 0.01


def test_collinear_points_flagged():
    g = inertia_from_density_grid([[1, 0, 0], [-1, 0, 0]], [0.5, 0.5])
    assert np.allclose(g.J, np.diag([0.0, 1.0, 1.0]))
    assert not g.positive_definite


def test_density_grid_requires_centering():
    pts = np.array([[1.0, 0, 0], [2.0, 0, 0], [1.5, 1.0, 0]])
    m = np.ones(3)
    with pytest.raises(NotCenterOfMass):
        inertia_from_density_grid(pts, m)
    g = inertia_from_density_grid(pts - center_of_mass(pts, m), m)
    assert np.allclose(g.J, brute_force_inertia(pts - pts.mean(axis=0), m))


def test_empty_body():
    with pytest.raises(EmptyBody):
        inertia_from_density_grid(np.zeros((0, 3)), np.zeros(0))
    with pytest.raises(EmptyBody):
        center_of_mass([[0, 0, 0]], [0.0])


def test_presets_and_aliases():
    assert set(PRESETS) == {"J0", "J1", "J2", "J3", "J4", "J5"}
    for alias, name in PRESET_ALIASES.items():
        assert np.array_equal(get_preset(alias), PRESETS[name])
    with pytest.raises(KeyError):
        get_preset("J9")
    J = get_preset("J1")
    J[0, 0] = 99
    assert PRESETS["J1"][0, 0] == 0.42


def test_check_inertia():
    check_inertia(get_preset("J3"))
    with pytest.raises(NotSPD):
        check_inertia(get_preset("J2"))
    with pytest.raises(NotSPD):
        check_inertia(np.array([[1, 0.1, 0], [0, 1, 0], [0, 0, 1.0]]))
    with pytest.raises(NotSPD):
        check_inertia(np.eye(2))


def test_classify_j1():
    rep = classify_equilibria(get_preset("J1"))
    assert np.allclose(rep.principal_moments, [0.42, 1.41, 1.67])
    assert np.allclose(np.abs(rep.principal_axes), np.eye(3))
    assert rep.axis_labels == ("stable-long", "unstable-intermediate", "stable-short")


def test_classify_j0_degenerate():
    with pytest.raises(DegenerateSpectrum):
        classify_equilibria(get_preset("J0"))


def test_principal_decomposition_reconstructs(rng):
    A = rng.standard_normal((3, 3))
    J = A @ A.T + np.eye(3)
    w, axes = principal_decomposition(J)
    assert np.allclose(axes.T @ np.diag(w) @ axes, J)
    assert np.all(np.diff(w) >= 0)

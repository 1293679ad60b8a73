"""Identify a moment-of-inertia matrix from rotation-only observations.

Each observed window ``R_0..R_T`` is pushed through two pipelines:

* the encoding side uses the observations directly: angular velocities from
  consecutive pairs, momenta ``pi_ae = J omega``;
* the dynamics side starts from ``(R_0, J omega_0)`` and integrates the
  Lie-Poisson equations forward, giving ``R_dyn`` and ``pi_dyn``.

The two latent losses compare them (orientation by right difference,
momentum by squared error), and Adam minimizes their weighted sum over the six
Cholesky parameters of ``J`` using central finite-difference gradients.

Rotations alone fix ``J`` only up to a positive scale, so results are
compared after rescaling to trace 3.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import asdict, dataclass, field
from typing import Callable, NamedTuple

import numpy as np
from sklearn.base import BaseEstimator

from .dynamics import propagate_arrays
from .exceptions import AllSequencesDegenerate, DegenerateFirstStep, InvalidConfig
from .inertia import InertiaParams, inertia_from_params, params_from_inertia
from .so3 import _quat_to_matrix_unchecked, matrix_to_quat, so3_right_difference_distance
from .validation import check_positive, check_rotation_sequences
from .velocity import estimate_sequence_velocities

logger = logging.getLogger(__name__)


@dataclass
class ObservationSet:
    dt: float
    sequences: list

    def __post_init__(self):
        self.dt = check_positive("dt", self.dt)
        self.sequences = check_rotation_sequences(self.sequences)


@dataclass
class IdentConfig:
    learning_rate: float = 1e-3
    iterations: int = 1000
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    lambda_R: float = 1.0
    lambda_Pi: float = 1.0
    normalization: str = "trace"
    seed: int = 0
    # windows of this many frames are cut from each sequence; None keeps whole sequences
    sequence_length: int | None = 10
    fd_step: float = 1e-5
    init: InertiaParams | None = None

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise InvalidConfig("learning_rate must be positive")
        if self.iterations < 0:
            raise InvalidConfig("iterations must be non-negative")
        if self.lambda_R < 0 or self.lambda_Pi < 0 or self.lambda_R + self.lambda_Pi == 0:
            raise InvalidConfig("loss weights must be non-negative and not both zero")
        if self.normalization not in ("trace", "none"):
            raise InvalidConfig(f"unknown normalization {self.normalization!r}")
        if self.sequence_length is not None and self.sequence_length < 2:
            raise InvalidConfig("sequence_length must be at least 2")
        if not self.fd_step > 0:
            raise InvalidConfig("fd_step must be positive")

    @property
    def weights(self) -> tuple[float, float]:
        return (self.lambda_R, self.lambda_Pi)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["init"] = None if self.init is None else self.init.to_vector().tolist()
        return d


class LatentLoss(NamedTuple):
    total: float
    latent_R: float
    latent_Pi: float


@dataclass
class IdentResult:
    params: InertiaParams
    J: np.ndarray
    J_normalized: np.ndarray
    loss_history: np.ndarray  # (n, 3): total, latent_R, latent_Pi per evaluated iterate
    converged: bool
    loss: float
    n_iter: int
    config: IdentConfig = field(default_factory=IdentConfig)

    def to_dict(self) -> dict:
        return {
            "J": self.J.tolist(),
            "J_normalized": self.J_normalized.tolist(),
            "phi1": self.params.phi1.tolist(),
            "phi2": self.params.phi2.tolist(),
            "loss": self.loss,
            "loss_history": self.loss_history.tolist(),
            "n_iter": self.n_iter,
            "converged": self.converged,
            "config": self.config.to_dict(),
        }


def normalize_trace(J) -> np.ndarray:
    J = np.asarray(J, dtype=float)
    return 3.0 * J / np.trace(J)


class Rollout(NamedTuple):
    rotations_dyn: np.ndarray  # (L, 3, 3), index 0 is R_0
    pi_dyn: np.ndarray  # (L, 3)
    pi_ae: np.ndarray  # (L - 2, 3), for frames 1..L-2


def pipeline_rollout(params: InertiaParams, seq, dt) -> Rollout:
    seq = check_rotation_sequences([seq])[0]
    dt = check_positive("dt", dt)
    J = inertia_from_params(params)
    omega, branches = estimate_sequence_velocities(seq, dt)
    if branches[0] == "pi-angle":
        raise DegenerateFirstStep("first observation pair is a half turn; initial velocity sign is ambiguous")
    q, pi = propagate_arrays(matrix_to_quat(seq[0]), J @ omega[0], J, dt, len(seq) - 1)
    return Rollout(_quat_to_matrix_unchecked(q), pi, omega[1:] @ J.T)


def _windows(seq, length):
    if length is None or len(seq) <= length:
        return [seq]
    return [seq[s:s + length] for s in range(0, len(seq) - length + 1, length)]


class _LatentProblem:
    """Observation-side quantities cached once; ``evaluate`` only reruns the dynamics."""

    def __init__(self, obs: ObservationSet, weights=(1.0, 1.0), sequence_length=None):
        self.dt = obs.dt
        self.weights = tuple(float(w) for w in weights)
        groups: dict[int, list] = {}
        skipped = 0
        total = 0
        for seq in obs.sequences:
            for win in _windows(seq, sequence_length):
                total += 1
                omega, branches = estimate_sequence_velocities(win, self.dt)
                if branches[0] == "pi-angle":
                    skipped += 1
                    continue
                groups.setdefault(len(win), []).append((win, matrix_to_quat(win[0]), omega))
        if not groups:
            raise AllSequencesDegenerate(
                f"all {total} observation windows start with a half-turn step"
            )
        if skipped:
            warnings.warn(f"skipped {skipped} of {total} windows whose first step is a half turn")
        self.groups = []
        self.count = 0
        for length in sorted(groups):
            items = groups[length]
            R_obs = np.stack([w for w, _, _ in items], axis=1)  # (L, K, 3, 3)
            q0 = np.stack([q for _, q, _ in items])
            omega = np.stack([o for _, _, o in items], axis=1)  # (L-1, K, 3)
            self.groups.append((length, R_obs, q0, omega))
            self.count += (length - 1) * len(items)

    def evaluate_stack(self, Js) -> np.ndarray:
        """Losses for a stack of inertia matrices ``(M, 3, 3)``; returns ``(M, 3)``."""
        Js = np.asarray(Js, dtype=float)
        Jb = Js[:, None]  # (M, 1, 3, 3), broadcasts over windows
        sum_R = np.zeros(len(Js))
        sum_Pi = np.zeros(len(Js))
        for length, R_obs, q0, omega in self.groups:
            pi0 = (Jb @ omega[0][..., None])[..., 0]  # (M, K, 3)
            q, pi = propagate_arrays(np.broadcast_to(q0, pi0.shape[:-1] + (4,)), pi0, Jb,
                                     self.dt, length - 1)
            R_dyn = _quat_to_matrix_unchecked(q[1:])  # (L-1, M, K, 3, 3)
            dist = so3_right_difference_distance(R_obs[1:, None], R_dyn)
            sum_R += dist.sum(axis=(0, 2))
            pi_ae = (Jb @ omega[1:, None, ..., None])[..., 0]  # (L-2, M, K, 3)
            diff = pi_ae - pi[1:-1]
            sum_Pi += np.sum(diff * diff, axis=(0, 2, 3))
        lR = sum_R / self.count
        lPi = sum_Pi / self.count
        return np.stack([self.weights[0] * lR + self.weights[1] * lPi, lR, lPi], axis=-1)

    def evaluate_matrix(self, J) -> LatentLoss:
        return LatentLoss(*map(float, self.evaluate_stack(np.asarray(J, dtype=float)[None])[0]))

    def evaluate(self, params: InertiaParams) -> LatentLoss:
        return self.evaluate_matrix(inertia_from_params(params))

    def total(self, x) -> float:
        return self.evaluate(InertiaParams.from_vector(x)).total

    def total_stack(self, X) -> np.ndarray:
        Js = np.stack([inertia_from_params(InertiaParams.from_vector(x)) for x in X])
        return self.evaluate_stack(Js)[:, 0]


def latent_loss(params: InertiaParams, obs: ObservationSet, weights=(1.0, 1.0),
                sequence_length=None) -> LatentLoss:
    return _LatentProblem(obs, weights, sequence_length).evaluate(params)


def fd_gradient(fun: Callable, x, h=1e-5, vectorized=False) -> np.ndarray:
    """Central-difference gradient with per-coordinate step ``max(h, h*|x_j|)``.

    With ``vectorized=True``, ``fun`` receives all ``2n`` probe points as one
    ``(2n, n)`` array and must return their ``2n`` values.
    """
    x = np.asarray(x, dtype=float)
    if not h > 0:
        raise ValueError("h must be positive")
    n = x.size
    steps = np.maximum(h, h * np.abs(x))
    probes = np.repeat(x[None], 2 * n, axis=0)
    idx = np.arange(n)
    probes[2 * idx, idx] += steps
    probes[2 * idx + 1, idx] -= steps
    if vectorized:
        values = np.asarray(fun(probes), dtype=float)
    else:
        values = np.array([fun(p) for p in probes], dtype=float)
    return (values[0::2] - values[1::2]) / (2.0 * steps)


def latent_loss_gradient(params: InertiaParams, obs: ObservationSet, weights=(1.0, 1.0),
                         h=1e-5, sequence_length=None) -> np.ndarray:
    problem = _LatentProblem(obs, weights, sequence_length)
    return fd_gradient(problem.total_stack, params.to_vector(), h, vectorized=True)


class Adam:
    def __init__(self, lr=1e-3, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.m = None
        self.v = None
        self.t = 0

    def step(self, x, g):
        if self.m is None:
            self.m = np.zeros_like(x)
            self.v = np.zeros_like(x)
        self.t += 1
        self.m = self.beta1 * self.m + (1.0 - self.beta1) * g
        self.v = self.beta2 * self.v + (1.0 - self.beta2) * (g * g)
        m_hat = self.m / (1.0 - self.beta1 ** self.t)
        v_hat = self.v / (1.0 - self.beta2 ** self.t)
        return x - self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


_CONVERGENCE_WINDOW = 20
_CONVERGENCE_RTOL = 1e-10


def identify_inertia(obs: ObservationSet, cfg: IdentConfig | None = None) -> IdentResult:
    cfg = cfg or IdentConfig()
    if not any(len(s) >= 3 for s in obs.sequences):
        raise ValueError("identification needs at least one sequence of three or more frames")
    problem = _LatentProblem(obs, cfg.weights, cfg.sequence_length)
    init = cfg.init if cfg.init is not None else params_from_inertia(np.eye(3))
    x = init.to_vector()
    opt = Adam(cfg.learning_rate, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps)

    history = []
    best_loss, best_x = np.inf, x
    converged = False
    for it in range(cfg.iterations + 1):
        loss = problem.evaluate(InertiaParams.from_vector(x))
        history.append(loss)
        if loss.total < best_loss:
            best_loss, best_x = loss.total, x
        if it % 50 == 0:
            logger.debug("iter %d loss %.6g (R %.3g, Pi %.3g)", it, *loss)
        if it == cfg.iterations:
            break
        if it >= _CONVERGENCE_WINDOW:
            old = history[it - _CONVERGENCE_WINDOW].total
            if abs(loss.total - old) <= _CONVERGENCE_RTOL * abs(old):
                converged = True
                break
        x = opt.step(x, fd_gradient(problem.total_stack, x, cfg.fd_step, vectorized=True))

    params = InertiaParams.from_vector(best_x)
    J = inertia_from_params(params)
    J_norm = normalize_trace(J) if cfg.normalization == "trace" else J.copy()
    return IdentResult(
        params=params,
        J=J,
        J_normalized=J_norm,
        loss_history=np.array(history, dtype=float).reshape(-1, 3),
        converged=converged,
        loss=float(best_loss),
        n_iter=len(history) - 1,
        config=cfg,
    )


class InertiaIdentifier(BaseEstimator):
    """Scikit-learn style wrapper around :func:`identify_inertia`.

    ``fit`` takes rotation sequences, either an ``(N, L, 3, 3)`` array, a list
    of ``(L_k, 3, 3)`` arrays or an :class:`ObservationSet` (whose ``dt`` then
    overrides the ``dt`` parameter).

    After fitting, ``inertia_`` is the raw identified matrix and
    ``inertia_normalized_`` its trace-3 rescaling; only the latter is
    meaningful from rotation data.
    """

    def __init__(self, dt=1e-3, learning_rate=1e-3, iterations=1000, adam_beta1=0.9,
                 adam_beta2=0.999, adam_eps=1e-8, lambda_R=1.0, lambda_Pi=1.0,
                 normalization="trace", sequence_length=10, fd_step=1e-5, init=None, seed=0):
        self.dt = dt
        self.learning_rate = learning_rate
        self.iterations = iterations
        self.adam_beta1 = adam_beta1
        self.adam_beta2 = adam_beta2
        self.adam_eps = adam_eps
        self.lambda_R = lambda_R
        self.lambda_Pi = lambda_Pi
        self.normalization = normalization
        self.sequence_length = sequence_length
        self.fd_step = fd_step
        self.init = init
        self.seed = seed

    def _config(self) -> IdentConfig:
        init = self.init
        if init is not None and not isinstance(init, InertiaParams):
            init = params_from_inertia(init)
        return IdentConfig(
            learning_rate=self.learning_rate, iterations=self.iterations,
            adam_beta1=self.adam_beta1, adam_beta2=self.adam_beta2, adam_eps=self.adam_eps,
            lambda_R=self.lambda_R, lambda_Pi=self.lambda_Pi, normalization=self.normalization,
            seed=self.seed, sequence_length=self.sequence_length, fd_step=self.fd_step, init=init,
        )

    def _observations(self, X) -> ObservationSet:
        if isinstance(X, ObservationSet):
            return X
        return ObservationSet(self.dt, check_rotation_sequences(X))

    def fit(self, X, y=None):
        obs = self._observations(X)
        result = identify_inertia(obs, self._config())
        self.result_ = result
        self.params_ = result.params
        self.inertia_ = result.J
        self.inertia_normalized_ = result.J_normalized
        self.loss_history_ = result.loss_history
        self.converged_ = result.converged
        self.n_iter_ = result.n_iter
        self.dt_ = obs.dt
        return self

    def _check_fitted(self):
        if not hasattr(self, "params_"):
            from sklearn.exceptions import NotFittedError

            raise NotFittedError("InertiaIdentifier is not fitted yet; call fit first")

    def predict(self, X):
        """Roll each sequence forward from its first two frames; returns predicted rotations."""
        self._check_fitted()
        obs = self._observations(X)
        preds = [pipeline_rollout(self.params_, s, obs.dt).rotations_dyn for s in obs.sequences]
        if len({p.shape for p in preds}) == 1:
            return np.stack(preds)
        return preds

    def score(self, X, y=None):
        """Negative weighted latent loss (higher is better)."""
        self._check_fitted()
        obs = self._observations(X)
        problem = _LatentProblem(obs, (self.lambda_R, self.lambda_Pi), self.sequence_length)
        return -problem.evaluate(self.params_).total

"""Trajectory datasets: seeded generation, NDJSON records and a JSON manifest.

A dataset is a directory holding

``manifest.json``
    configuration echo, the inertia matrix, per-trajectory initial
    conditions, the random-number recipe and a conservation summary;
``records.ndjson``
    one line per time step, in trajectory-major order::

        {"traj": k, "step": i, "t": i*dt, "q": [x, y, z, w], "R": [9 row-major],
         "pi": [3], "omega": [3]}

Floats in the records are printed with 17 significant digits, enough to
round-trip IEEE doubles exactly.

Trajectory ``k`` draws its initial condition from
``numpy.random.Generator(PCG64(SeedSequence([seed, k])))``: four standard
normals for the orientation quaternion, then three for the momentum direction.
The draws therefore do not depend on how many trajectories are generated or in
which order.
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .dynamics import BodyState, Trajectory, conservation_drift, propagate_arrays
from .exceptions import ConservationViolation, FormatError, InvalidConfig, NotSPD, VersionMismatch
from .identification import ObservationSet
from .inertia import check_inertia, get_preset, preset_name
from .so3 import _quat_to_matrix_unchecked, matrix_to_quat, random_rotation, random_unit_vector

FORMAT_VERSION = 1
MANIFEST_NAME = "manifest.json"
RECORDS_NAME = "records.ndjson"
RNG_RECIPE = "numpy PCG64 seeded by SeedSequence([seed, k]); 4 normals -> quaternion, 3 normals -> momentum direction"
OUTPUT_DIR_ENV = "RIGIDSPIN_OUTPUT_DIR"
CONSERVATION_TOL = 1e-4


@dataclass
class DatasetConfig:
    inertia: object = "J1"  # preset name or 3x3 matrix
    num_trajectories: int = 1000
    steps: int = 100
    dt: float = 1e-3
    pi_norm: float = 50.0
    seed: int = 0

    def __post_init__(self):
        if self.num_trajectories < 1:
            raise InvalidConfig("num_trajectories must be at least 1")
        if self.steps < 1:
            raise InvalidConfig("steps must be at least 1")
        if not self.dt > 0:
            raise InvalidConfig("dt must be positive")
        if not self.pi_norm > 0:
            raise InvalidConfig("pi_norm must be positive")
        if int(self.seed) != self.seed or self.seed < 0:
            raise InvalidConfig("seed must be a non-negative integer")

    def inertia_matrix(self) -> np.ndarray:
        if isinstance(self.inertia, str):
            J = get_preset(self.inertia)
        else:
            J = np.asarray(self.inertia, dtype=float)
        try:
            return check_inertia(J)
        except NotSPD as exc:
            raise InvalidConfig(f"inertia is not a valid SPD matrix: {exc}") from None

    def to_dict(self) -> dict:
        d = asdict(self)
        if isinstance(self.inertia, str):
            d["inertia"] = preset_name(self.inertia)
        else:
            d["inertia"] = "custom"
        return d


def trajectory_rng(seed: int, k: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(k)]))


def sample_initial_condition(rng: np.random.Generator, pi_norm: float = 50.0) -> BodyState:
    """Uniform orientation and uniform momentum direction, ``|pi| = pi_norm``."""
    if not pi_norm > 0:
        raise ValueError("pi_norm must be positive")
    q0 = matrix_to_quat(random_rotation(rng))
    pi0 = pi_norm * random_unit_vector(rng)
    return BodyState(q0, pi0)


def default_output_dir(name: str) -> Path:
    return Path(os.environ.get(OUTPUT_DIR_ENV, "rigidspin-output")) / name


def _fmt(values) -> str:
    return "[" + ",".join(format(float(v), ".17g") for v in values) + "]"


def _prepare_dir(out_dir, force) -> Path:
    out = Path(out_dir)
    targets = [out / MANIFEST_NAME, out / RECORDS_NAME]
    if not force and any(p.exists() for p in targets):
        raise FileExistsError(f"{out} already holds a dataset (pass force=True to overwrite)")
    out.mkdir(parents=True, exist_ok=True)
    return out


def write_dataset(out_dir, J, dt, q, pi, config: dict, force=False) -> dict:
    """Write trajectories ``q (T+1, N, 4)``, ``pi (T+1, N, 3)`` and return the manifest."""
    out = _prepare_dir(out_dir, force)
    J = np.asarray(J, dtype=float)
    Jinv = np.linalg.inv(J)
    R = _quat_to_matrix_unchecked(q)
    omega = pi @ Jinv.T
    traj = Trajectory(dt, q, pi)
    energy_drift, casimir_drift = conservation_drift(traj, J)
    steps, n = q.shape[0] - 1, q.shape[1]

    with open(out / RECORDS_NAME, "w", encoding="utf-8", newline="\n") as fh:
        for k in range(n):
            for i in range(steps + 1):
                fh.write(
                    f'{{"traj":{k},"step":{i},"t":{format(i * dt, ".17g")},'
                    f'"q":{_fmt(q[i, k])},"R":{_fmt(R[i, k].ravel())},'
                    f'"pi":{_fmt(pi[i, k])},"omega":{_fmt(omega[i, k])}}}\n'
                )

    manifest = {
        "format_version": FORMAT_VERSION,
        "created": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "config": config,
        "dt": dt,
        "steps": steps,
        "num_trajectories": n,
        "inertia": J.tolist(),
        "rng": RNG_RECIPE,
        "records_file": RECORDS_NAME,
        "initial_conditions": [{"q0": q[0, k].tolist(), "pi0": pi[0, k].tolist()} for k in range(n)],
        "conservation": {"max_energy_drift": energy_drift, "max_casimir_drift": casimir_drift},
    }
    with open(out / MANIFEST_NAME, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    return manifest


def generate_dataset(cfg: DatasetConfig, out_dir, force=False) -> dict:
    J = cfg.inertia_matrix()
    states = [sample_initial_condition(trajectory_rng(cfg.seed, k), cfg.pi_norm)
              for k in range(cfg.num_trajectories)]
    q0 = np.stack([s.q for s in states])
    pi0 = np.stack([s.pi for s in states])
    q, pi = propagate_arrays(q0, pi0, J, cfg.dt, cfg.steps)

    energy_drift, casimir_drift = conservation_drift(Trajectory(cfg.dt, q, pi), J)
    if energy_drift > CONSERVATION_TOL or casimir_drift > CONSERVATION_TOL:
        raise ConservationViolation(
            f"integration drifted beyond {CONSERVATION_TOL:g}: energy {energy_drift:.3g}, "
            f"|pi| {casimir_drift:.3g}; reduce dt or pi_norm"
        )
    return write_dataset(out_dir, J, cfg.dt, q, pi, cfg.to_dict(), force=force)


def _manifest_path(path) -> Path:
    p = Path(path)
    return p / MANIFEST_NAME if p.is_dir() else p


def read_manifest(path) -> dict:
    mpath = _manifest_path(path)
    with open(mpath, encoding="utf-8") as fh:
        try:
            manifest = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{mpath}: invalid manifest JSON ({exc.msg})", exc.lineno) from None
    version = manifest.get("format_version")
    if version != FORMAT_VERSION:
        raise VersionMismatch(f"{mpath}: format version {version!r}, expected {FORMAT_VERSION}")
    for key in ("dt", "steps", "num_trajectories", "records_file"):
        if key not in manifest:
            raise FormatError(f"{mpath}: manifest lacks {key!r}")
    return manifest


@dataclass
class Dataset:
    manifest: dict
    q: np.ndarray  # (N, T+1, 4)
    R: np.ndarray  # (N, T+1, 3, 3)
    pi: np.ndarray  # (N, T+1, 3)
    omega: np.ndarray  # (N, T+1, 3)

    @property
    def dt(self) -> float:
        return float(self.manifest["dt"])

    @property
    def inertia(self) -> np.ndarray | None:
        J = self.manifest.get("inertia")
        return None if J is None else np.asarray(J, dtype=float)


_FIELDS = {"q": 4, "R": 9, "pi": 3, "omega": 3}


def load_dataset(path) -> Dataset:
    manifest = read_manifest(path)
    mpath = _manifest_path(path)
    rpath = mpath.parent / manifest["records_file"]
    n, steps = int(manifest["num_trajectories"]), int(manifest["steps"])
    arrays = {key: np.empty((n, steps + 1, size)) for key, size in _FIELDS.items()}
    expected = n * (steps + 1)
    count = 0
    with open(rpath, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FormatError(f"{rpath}: malformed record ({exc.msg})", lineno) from None
            if count >= expected:
                raise FormatError(f"{rpath}: more records than the manifest declares", lineno)
            k, i = divmod(count, steps + 1)
            if not isinstance(rec, dict) or rec.get("traj") != k or rec.get("step") != i:
                raise FormatError(f"{rpath}: expected record traj={k} step={i}", lineno)
            for key, size in _FIELDS.items():
                val = rec.get(key)
                if not isinstance(val, list) or len(val) != size:
                    raise FormatError(f"{rpath}: field {key!r} must be a list of {size} numbers", lineno)
                arrays[key][k, i] = val
            count += 1
    if count != expected:
        k, i = divmod(count, steps + 1)
        raise FormatError(
            f"{rpath}: truncated, {count} of {expected} records (missing traj={k} step={i})",
            count + 1,
        )
    return Dataset(manifest, arrays["q"], arrays["R"].reshape(n, steps + 1, 3, 3),
                   arrays["pi"], arrays["omega"])


def load_observations(path, stride: int = 1) -> ObservationSet:
    """Rotation sequences of a dataset, optionally subsampled in time by ``stride``."""
    if stride < 1:
        raise ValueError("stride must be at least 1")
    ds = load_dataset(path)
    return ObservationSet(ds.dt * stride, [R[::stride] for R in ds.R])


def repropagate(manifest: dict) -> tuple[np.ndarray, np.ndarray]:
    """Integrate the manifest's initial conditions again; returns ``(q, pi)`` as ``(N, T+1, .)``."""
    J = np.asarray(manifest["inertia"], dtype=float)
    q0 = np.array([ic["q0"] for ic in manifest["initial_conditions"]])
    pi0 = np.array([ic["pi0"] for ic in manifest["initial_conditions"]])
    q, pi = propagate_arrays(q0, pi0, J, float(manifest["dt"]), int(manifest["steps"]))
    return np.swapaxes(q, 0, 1), np.swapaxes(pi, 0, 1)

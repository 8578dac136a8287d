"""Second-order attractor movement primitives.

A movement primitive here is a critically-dampable spring-damper system
pulled toward a goal, shaped by a phase-dependent forcing term:

    T^2 * xdd = alpha * (beta * (g - x) - T * xd) + f(z)

with the forcing term a normalized, decay-gated blend of basis functions

    f(z) = z * sum_i(w_i * psi_i(p)) / sum_i(psi_i(p)),
    z    = exp(-decay_rate * p^3),   p = min(t / T, 1).

The decay gate ``z`` starts near one (forcing active, trajectory shaped by
the weights) and collapses toward zero near the end of the motion, so the
attractor always wins and the trajectory converges to the goal.

Five degrees of freedom are rolled out together for the tabletop arm:
``[x, y, z, yaw, gripper]``. The positional/rotational dimensions use
Gaussian bases; the gripper uses a step basis (one indicator per equal
phase segment) so a weight vector directly schedules when the continuous
gripper signal crosses its open/close threshold.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, replace

import numpy as np

from .errors import BasisError, IntegrationError

GAUSSIAN = "gaussian"
STEP = "step"

#: DOF order used by 5-DOF rollouts.
DOF_NAMES = ("x", "y", "z", "yaw", "grip")

#: Index of the gripper dimension inside a 5-DOF rollout.
GRIP = 4

_DEGENERATE_BASIS_FLOOR = 1e-12


@dataclass(frozen=True)
class BasisSet:
    """A family of phase-domain basis functions on [0, 1].

    Parameters
    ----------
    kind : str
        ``"gaussian"`` or ``"step"``.
    count : int
        Number of basis functions, at least 2.
    centers : np.ndarray
        Uniformly spaced centers, ``centers[0] == 0``, ``centers[-1] == 1``.
    width_gain : float or None
        Exponent gain ``h`` for gaussian bases (``psi_i = exp(-h (p-c_i)^2)``).
        ``None`` for the step kind, whose functions are indicators of the
        ``count`` equal-width segments of [0, 1].
    """

    kind: str
    count: int
    centers: np.ndarray
    width_gain: float | None

    def evaluate(self, phase: float) -> np.ndarray:
        """Evaluate all basis functions at one phase value.

        Gaussian activations lie in (0, 1]; the step kind returns a one-hot
        vector selecting the segment containing ``phase`` (phase 1 belongs
        to the last segment).
        """
        if not 0.0 <= phase <= 1.0:
            raise ValueError(f"phase must lie in [0, 1], got {phase}")
        return self.evaluate_many(np.asarray([phase], dtype=float))[0]

    def evaluate_many(self, phases: np.ndarray) -> np.ndarray:
        """Vectorized :meth:`evaluate`; returns shape (len(phases), count)."""
        phases = np.asarray(phases, dtype=float)
        if self.kind == GAUSSIAN:
            d = phases[:, None] - self.centers[None, :]
            return np.exp(-self.width_gain * d * d)
        seg = np.minimum((phases * self.count).astype(int), self.count - 1)
        out = np.zeros((phases.shape[0], self.count))
        out[np.arange(phases.shape[0]), seg] = 1.0
        return out


def make_basis(kind: str, count: int) -> BasisSet:
    """Construct a uniformly spaced basis family.

    For the gaussian kind the width gain is tied to the spacing,
    ``h = (4 * (count - 1))**2``, which makes each bump's standard
    deviation a quarter of the center spacing.
    """
    if count < 2:
        raise BasisError(f"basis needs at least 2 functions, got {count}")
    if kind not in (GAUSSIAN, STEP):
        raise BasisError(f"unknown basis kind {kind!r}")
    centers = np.linspace(0.0, 1.0, count)
    width_gain = float((4.0 * (count - 1)) ** 2) if kind == GAUSSIAN else None
    return BasisSet(kind=kind, count=count, centers=centers, width_gain=width_gain)


def eval_basis(basis: BasisSet, phase: float) -> np.ndarray:
    """Functional alias for :meth:`BasisSet.evaluate`."""
    return basis.evaluate(phase)


@dataclass(frozen=True)
class CanonicalState:
    """Shared phase clock of a rollout: time, normalized phase, decay gate."""

    time: float
    phase: float
    decay: float


def canonical(time: float, duration: float, decay_rate: float) -> CanonicalState:
    """Canonical system state at ``time``.

    Phase is normalized time clamped to [0, 1]; the decay gate is
    ``exp(-decay_rate * phase**3)``. Both freeze once ``time`` passes
    ``duration``.
    """
    if duration <= 0:
        raise ValueError("duration must be positive")
    if decay_rate <= 0:
        raise ValueError("decay_rate must be positive")
    if time < 0:
        raise ValueError("time must be non-negative")
    phase = min(time / duration, 1.0)
    return CanonicalState(time=time, phase=phase, decay=float(np.exp(-decay_rate * phase**3)))


def forcing(weights: np.ndarray, basis: BasisSet, canon: CanonicalState) -> float:
    """Normalized weighted basis blend, gated by the canonical decay.

    Satisfies ``|f| <= decay * max(|w|)`` for any phase; for a step basis
    the blend reduces to ``decay * w[segment]``.
    """
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (basis.count,):
        raise ValueError(
            f"weights length {weights.shape} does not match basis count {basis.count}"
        )
    psi = basis.evaluate(canon.phase)
    denom = psi.sum()
    if denom < _DEGENERATE_BASIS_FLOOR:
        raise BasisError(f"basis support vanished at phase {canon.phase}")
    return float(canon.decay * (weights @ psi) / denom)


@dataclass(frozen=True)
class DmpSpec:
    """Full parameterization of one movement-primitive dimension.

    ``alpha`` and ``beta`` define the spring-damper attractor (critical
    damping at ``beta == alpha / 4``), ``duration`` the nominal motion
    time, ``decay_rate`` the forcing gate's collapse speed. ``weights``
    holds one coefficient per basis function, already in forcing units
    (see :func:`specs_from_weights` for the scaling applied to raw
    generator weights).
    """

    alpha: float
    beta: float
    duration: float
    decay_rate: float
    basis: BasisSet
    weights: np.ndarray
    goal: float
    start: float
    start_velocity: float = 0.0

    def __post_init__(self):
        for name in ("alpha", "beta", "duration", "decay_rate"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (self.basis.count,):
            raise ValueError(
                f"expected {self.basis.count} weights, got {w.shape}"
            )
        object.__setattr__(self, "weights", w)


@dataclass(frozen=True)
class DofState:
    """Instantaneous state of one controlled degree of freedom."""

    position: float
    velocity: float
    acceleration: float = 0.0


def acceleration(spec: DmpSpec, position: float, velocity: float, force: float) -> float:
    """Attractor acceleration: ``(alpha*(beta*(g - x) - T*v) + f) / T^2``."""
    return (
        spec.alpha * (spec.beta * (spec.goal - position) - spec.duration * velocity) + force
    ) / spec.duration**2


_accel = acceleration


def step_dof(state: DofState, spec: DmpSpec, canon: CanonicalState, dt: float) -> DofState:
    """Advance one DOF by a single explicit integration step.

    Uses the explicit trapezoid (Heun) scheme: a forward-Euler predictor
    followed by averaging the endpoint slopes. Second-order accuracy is
    needed to track the closed-form attractor response to within 1e-3 at
    the default step of duration/1000.
    """
    if dt <= 0 or dt > spec.duration / 50.0:
        raise ValueError(f"dt must lie in (0, duration/50], got {dt}")
    f1 = forcing(spec.weights, spec.basis, canon)
    c2 = canonical(canon.time + dt, spec.duration, spec.decay_rate)
    f2 = forcing(spec.weights, spec.basis, c2)
    x, v = state.position, state.velocity
    a1 = _accel(spec, x, v, f1)
    x_e = x + dt * v
    v_e = v + dt * a1
    a2 = _accel(spec, x_e, v_e, f2)
    x_n = x + 0.5 * dt * (v + v_e)
    v_n = v + 0.5 * dt * (a1 + a2)
    a_n = _accel(spec, x_n, v_n, f2)
    for name, val in (("position", x_n), ("velocity", v_n), ("acceleration", a_n)):
        if not np.isfinite(val):
            raise IntegrationError(f"non-finite {name} ({val}) after step at t={canon.time}")
    return DofState(position=x_n, velocity=v_n, acceleration=a_n)


@dataclass
class Trajectory:
    """Fixed-rate samples of a 5-DOF rollout.

    ``poses`` and ``velocities`` have shape (n, 5) in DOF order
    ``[x, y, z, yaw, grip]``; ``decay`` carries the canonical gate value
    per sample. Times start at zero with constant spacing ``dt``.
    """

    dt: float
    duration: float
    times: np.ndarray
    poses: np.ndarray
    velocities: np.ndarray
    decay: np.ndarray

    def __len__(self) -> int:
        return self.times.shape[0]

    @property
    def phases(self) -> np.ndarray:
        return np.minimum(self.times / self.duration, 1.0)

    @property
    def final_pose(self) -> np.ndarray:
        return self.poses[-1]

    def to_csv(self) -> str:
        """Render as CSV with header t,x,y,z,yaw,grip,z_canonical."""
        buf = io.StringIO()
        buf.write("t,x,y,z,yaw,grip,z_canonical\n")
        for i in range(len(self)):
            row = [self.times[i], *self.poses[i], self.decay[i]]
            buf.write(",".join(f"{v:.9g}" for v in row) + "\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, duration: float) -> "Trajectory":
        lines = [ln for ln in text.strip().splitlines() if ln]
        if not lines or lines[0] != "t,x,y,z,yaw,grip,z_canonical":
            raise ValueError("not a trajectory CSV")
        data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
        times = data[:, 0]
        dt = float(times[1] - times[0]) if len(times) > 1 else 0.0
        return cls(
            dt=dt,
            duration=duration,
            times=times,
            poses=data[:, 1:6],
            velocities=np.zeros_like(data[:, 1:6]),
            decay=data[:, 6],
        )


@dataclass(frozen=True)
class DmpConfig:
    """Engine defaults for building and rolling out 5-DOF primitives.

    ``position_weight_gain`` converts a raw generator weight into meters
    of quasi-static path deviation at full gate (internally the stored
    weight is ``gain * alpha * beta * w``); ``gripper_weight_gain`` is the
    dimensionless multiple of ``alpha * beta`` applied to gripper weights
    so that holding weights can balance the goal attractor and delay the
    threshold crossing. The gripper signal is saturated to
    ``gripper_bounds`` during rollout.
    """

    alpha: float = 25.0
    beta: float = 6.25
    decay_rate: float = 6.0
    duration: float = 5.0
    basis_count: int = 11
    steps_per_duration: int = 1000
    settle_factor: float = 1.5
    settle_velocity: float = 1e-4
    goal_tolerance: float = 1e-3
    position_weight_gain: float = 0.25
    gripper_weight_gain: float = 10.0
    gripper_bounds: tuple[float, float] = (0.0, 1.0)
    gripper_threshold: float = 0.5

    @property
    def dt(self) -> float:
        return self.duration / self.steps_per_duration

    def with_duration(self, duration: float) -> "DmpConfig":
        return replace(self, duration=duration)


DEFAULT_CONFIG = DmpConfig()


def specs_from_weights(
    weights: np.ndarray,
    starts: np.ndarray,
    goals: np.ndarray,
    config: DmpConfig = DEFAULT_CONFIG,
) -> list[DmpSpec]:
    """Build the five per-DOF specs from a raw 5xB weight matrix.

    Rows 0-3 (x, y, z, yaw) get gaussian bases and are scaled by
    ``position_weight_gain * alpha * beta`` so a unit weight commands a
    quarter-meter of peak path deviation under the default gain. Row 4
    (gripper) gets the step basis and the gripper gain.
    """
    weights = np.asarray(weights, dtype=float)
    starts = np.asarray(starts, dtype=float)
    goals = np.asarray(goals, dtype=float)
    if weights.shape != (5, config.basis_count):
        raise ValueError(
            f"expected weight matrix of shape (5, {config.basis_count}), got {weights.shape}"
        )
    if starts.shape != (5,) or goals.shape != (5,):
        raise ValueError("starts and goals must have shape (5,)")
    gauss = make_basis(GAUSSIAN, config.basis_count)
    step = make_basis(STEP, config.basis_count)
    ab = config.alpha * config.beta
    specs = []
    for i in range(5):
        gain = config.gripper_weight_gain if i == GRIP else config.position_weight_gain
        specs.append(
            DmpSpec(
                alpha=config.alpha,
                beta=config.beta,
                duration=config.duration,
                decay_rate=config.decay_rate,
                basis=step if i == GRIP else gauss,
                weights=weights[i] * gain * ab,
                goal=float(goals[i]),
                start=float(starts[i]),
            )
        )
    return specs


def rollout(specs: list[DmpSpec], dt: float, config: DmpConfig = DEFAULT_CONFIG) -> Trajectory:
    """Integrate five DOFs against a shared canonical system.

    All specs must share duration and decay rate; DOF order is
    ``[x, y, z, yaw, grip]`` with a step basis on the gripper row and
    gaussian bases elsewhere. Integration runs to ``settle_factor *
    duration``, stopping early once every DOF's speed drops below
    ``settle_velocity`` after the nominal duration. The gripper signal is
    clamped to ``gripper_bounds`` after each step (velocity zeroed toward
    the bound) so holding weights cannot wind it arbitrarily far open.
    """
    if len(specs) != 5:
        raise ValueError(f"expected 5 specs, got {len(specs)}")
    duration = specs[0].duration
    decay_rate = specs[0].decay_rate
    for i, spec in enumerate(specs):
        if spec.duration != duration or spec.decay_rate != decay_rate:
            raise ValueError("all specs must share duration and decay_rate")
        want = STEP if i == GRIP else GAUSSIAN
        if spec.basis.kind != want:
            raise ValueError(f"DOF {DOF_NAMES[i]} must use a {want} basis")
    if dt <= 0 or dt > duration / 50.0:
        raise ValueError(f"dt must lie in (0, duration/50], got {dt}")

    n_steps = int(round(config.settle_factor * duration / dt))
    times = np.arange(n_steps + 1) * dt
    phases = np.minimum(times / duration, 1.0)
    decay = np.exp(-decay_rate * phases**3)

    # Forcing is a pure function of phase; precompute it on the grid.
    force = np.empty((n_steps + 1, 5))
    gauss_psi = specs[0].basis.evaluate_many(phases)
    gauss_norm = gauss_psi / gauss_psi.sum(axis=1, keepdims=True)
    for i in range(4):
        force[:, i] = decay * (gauss_norm @ specs[i].weights)
    seg = np.minimum((phases * specs[GRIP].basis.count).astype(int), specs[GRIP].basis.count - 1)
    force[:, GRIP] = decay * specs[GRIP].weights[seg]

    alpha = np.array([s.alpha for s in specs])
    beta = np.array([s.beta for s in specs])
    goal = np.array([s.goal for s in specs])
    x = np.array([s.start for s in specs], dtype=float)
    v = np.array([s.start_velocity for s in specs], dtype=float)
    lo, hi = config.gripper_bounds

    poses = np.empty((n_steps + 1, 5))
    vels = np.empty((n_steps + 1, 5))
    poses[0], vels[0] = x, v
    n_kept = n_steps + 1
    for k in range(n_steps):
        a1 = (alpha * (beta * (goal - x) - duration * v) + force[k]) / duration**2
        x_e = x + dt * v
        v_e = v + dt * a1
        a2 = (alpha * (beta * (goal - x_e) - duration * v_e) + force[k + 1]) / duration**2
        x = x + 0.5 * dt * (v + v_e)
        v = v + 0.5 * dt * (a1 + a2)
        if x[GRIP] < lo:
            x[GRIP] = lo
            v[GRIP] = max(v[GRIP], 0.0)
        elif x[GRIP] > hi:
            x[GRIP] = hi
            v[GRIP] = min(v[GRIP], 0.0)
        if not np.all(np.isfinite(x)) or not np.all(np.isfinite(v)):
            bad = int(np.argmax(~(np.isfinite(x) & np.isfinite(v))))
            raise IntegrationError(
                f"non-finite state for DOF {DOF_NAMES[bad]} at sample {k + 1}",
                dof=DOF_NAMES[bad],
                step=k + 1,
            )
        poses[k + 1], vels[k + 1] = x, v
        if times[k + 1] > duration and np.max(np.abs(v)) < config.settle_velocity:
            n_kept = k + 2
            break

    return Trajectory(
        dt=dt,
        duration=duration,
        times=times[:n_kept],
        poses=poses[:n_kept],
        velocities=vels[:n_kept],
        decay=decay[:n_kept],
    )


def gripper_crossing_phase(trajectory: Trajectory, threshold: float) -> float | None:
    """Phase of the first sample whose gripper value reaches ``threshold``.

    Returns ``None`` when the signal never crosses. Samples past the
    nominal duration report phase 1.0.
    """
    if not 0.0 < threshold < 1.0:
        raise ValueError("threshold must lie in (0, 1)")
    above = trajectory.poses[:, GRIP] >= threshold
    if not above.any():
        return None
    return float(trajectory.phases[int(np.argmax(above))])

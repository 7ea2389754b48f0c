"""Simulation backends behind one observation/action interface.

Two backends exist: "test_sim", whose parameters are fully caller-controlled,
and "reference_real", a stand-in for a physical robot that applies a fixed
hidden profile (stop-on-collision, nonzero actuation and localization noise)
regardless of the supplied parameters. Swapping between them is a single
argument to make_backend, so the same agent code runs on both.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from nav2real import kernels
from nav2real.errors import DomainError, ProtocolError
from nav2real.geometry import Pose, Scene, is_navigable, normalize_angle, wrap_pi

FORWARD_STEP = 0.25
TURN_ANGLE = math.pi / 6.0
DEFAULT_RADIUS = 0.175


class Action:
    """The four discrete agent actions."""

    TURN_LEFT = "turn_left"
    TURN_RIGHT = "turn_right"
    FORWARD = "forward"
    STOP = "stop"

    ALL = (TURN_LEFT, TURN_RIGHT, FORWARD, STOP)


class BackendId:
    TEST_SIM = "test_sim"
    REFERENCE_REAL = "reference_real"

    ALL = (TEST_SIM, REFERENCE_REAL)


@dataclass(frozen=True)
class ActionNoise:
    """Gaussian displacement noise for one action: mean offsets and standard
    deviations over (along, lateral, heading) in body frame."""

    mean: tuple = (0.0, 0.0, 0.0)
    sigma: tuple = (0.0, 0.0, 0.0)

    def __post_init__(self):
        if len(self.mean) != 3 or len(self.sigma) != 3:
            raise DomainError("ActionNoise mean/sigma must have 3 components")
        if any(s < 0 for s in self.sigma):
            raise DomainError("ActionNoise sigmas must be non-negative")


# Default model: calibration placeholder with no ground-truth provenance,
# chosen so multiplier-1 rollouts of one action sequence visibly diverge.
@dataclass(frozen=True)
class ActuationNoiseModel:
    forward: ActionNoise = ActionNoise(sigma=(0.016, 0.012, 0.014))
    turn_left: ActionNoise = ActionNoise(sigma=(0.004, 0.004, 0.035))
    turn_right: ActionNoise = ActionNoise(sigma=(0.004, 0.004, 0.035))

    def for_action(self, action):
        if action == Action.FORWARD:
            return self.forward
        if action == Action.TURN_LEFT:
            return self.turn_left
        if action == Action.TURN_RIGHT:
            return self.turn_right
        raise DomainError(f"no noise model for action {action!r}")


_NOMINAL = {
    Action.FORWARD: (FORWARD_STEP, 0.0, 0.0),
    Action.TURN_LEFT: (0.0, 0.0, TURN_ANGLE),
    Action.TURN_RIGHT: (0.0, 0.0, -TURN_ANGLE),
}


@dataclass(frozen=True)
class SimParams:
    """Test-simulator knobs (the optimization variable of the grid search).

    Defaults reproduce the naive challenge-style setting: sliding on, no
    actuation/sensor/localization noise.
    """

    sliding: str = "on"
    noise_multiplier: float = 0.0
    depth_noise_sigma: float = 0.0
    localization_sigma: float = 0.0
    rays: int = 64
    fov: float = math.pi / 4.0
    depth_clip: float = 10.0
    noise_model: ActuationNoiseModel = field(default_factory=ActuationNoiseModel)

    def __post_init__(self):
        if self.sliding not in ("on", "off"):
            raise DomainError(f"sliding must be 'on' or 'off', got {self.sliding!r}")
        if not 0.0 <= self.noise_multiplier <= 1.0:
            raise DomainError("noise_multiplier must be in [0, 1]")
        if self.depth_noise_sigma < 0 or self.localization_sigma < 0:
            raise DomainError("noise sigmas must be non-negative")
        if self.rays < 1 or self.fov <= 0 or self.depth_clip <= 0:
            raise DomainError("rays/fov/depth_clip must be positive")

    def label(self):
        return f"sliding={self.sliding},m={self.noise_multiplier:g}"


# Hidden profile applied by the reference backend: stop-on-collision, a
# deliberately nontrivial actuation noise level, and sensing/localization
# noise. All of it is overridable via make_backend(reference_profile=...).
REFERENCE_PROFILE = SimParams(
    sliding="off",
    noise_multiplier=0.3,
    depth_noise_sigma=0.02,
    localization_sigma=0.07,
)


@dataclass
class Observation:
    """Egocentric sensor frame: a fan of depth readings (index 0 is the
    rightmost ray) and the goal in polar form relative to the agent."""

    depth: np.ndarray
    goal_r: float
    goal_azimuth: float


def sample_displacement(model, action, multiplier, rng):
    """Body-frame displacement (along, lateral, heading) for one action:
    nominal + mean offset + multiplier * sigma * standard normal draw."""
    if action == Action.STOP:
        raise DomainError("stop has no displacement")
    nominal = _NOMINAL[action]
    noise = model.for_action(action)
    draws = rng.standard_normal(3)
    return tuple(
        nominal[i] + noise.mean[i] + multiplier * noise.sigma[i] * draws[i]
        for i in range(3)
    )


class Backend:
    """One episode's simulator handle. Single-owner, stepped sequentially;
    the random stream derives from (seed, episode index) only."""

    def __init__(self, backend_id, scene, params, seed, radius=DEFAULT_RADIUS):
        if backend_id not in BackendId.ALL:
            raise DomainError(f"unknown backend id {backend_id!r}")
        self.backend_id = backend_id
        self.scene = scene
        self.params = params
        self.radius = float(radius)
        self._fan_offsets = np.linspace(-params.fov / 2.0, params.fov / 2.0, params.rays)
        self._seed = int(seed)
        self._rng = None
        self._pose = None
        self._goal = None
        self._done = False

    def reset(self, start, goal, episode=0):
        """Place the agent on an episode and derive its random stream."""
        start = start if isinstance(start, Pose) else Pose(np.asarray(start))
        goal = np.asarray(goal, dtype=np.float64).reshape(2)
        if not is_navigable(self.scene, start.position, self.radius):
            raise DomainError("episode start is not navigable")
        if not is_navigable(self.scene, goal, self.radius):
            raise DomainError("episode goal is not navigable")
        self._rng = np.random.default_rng(
            np.random.SeedSequence([self._seed, int(episode), 0])
        )
        self._pose = Pose(start.position.copy(), start.heading)
        self._goal = goal
        self._done = False
        return self

    @property
    def seed(self):
        return self._seed

    @property
    def pose(self):
        """True pose (ground truth; task accounting uses this)."""
        return Pose(self._pose.position.copy(), self._pose.heading)

    @property
    def goal(self):
        return self._goal.copy()

    @property
    def done(self):
        return self._done

    def true_goal_distance(self):
        d = self._goal - self._pose.position
        return float(math.hypot(d[0], d[1]))

    def step(self, action):
        """Apply one action. Returns (observation, collided)."""
        if self._pose is None:
            raise ProtocolError("backend not reset onto an episode")
        if self._done:
            raise ProtocolError("step after stop")
        if action not in Action.ALL:
            raise ProtocolError(f"invalid action {action!r}")

        collided = False
        if action == Action.STOP:
            self._done = True
            return self.observe(), False

        p = self.params
        along, lateral, dheading = sample_displacement(
            p.noise_model, action, p.noise_multiplier, self._rng
        )
        if action == Action.FORWARD:
            h = self._pose.heading
            ch, sh = math.cos(h), math.sin(h)
            dx = along * ch - lateral * sh
            dy = along * sh + lateral * ch
            x, y, collided = kernels.resolve_move(
                self.scene.segments,
                self._pose.position[0],
                self._pose.position[1],
                dx,
                dy,
                self.radius,
                p.sliding == "on",
            )
            self._pose = Pose(
                np.array([x, y]), normalize_angle(h + dheading)
            )
        else:
            # Turns are in-place: a disc body cannot collide while rotating,
            # so the translational noise components are not applied.
            self._pose = Pose(
                self._pose.position, normalize_angle(self._pose.heading + dheading)
            )
        return self.observe(), bool(collided)

    def observe(self):
        """Egocentric observation from the current state.

        Depth and localization noise draws are consumed even when their
        sigmas are zero, so random streams stay aligned across parameter
        settings (common random numbers for the grid search).
        """
        if self._pose is None:
            raise ProtocolError("backend not reset onto an episode")
        p = self.params
        pos = self._pose.position
        angles = self._pose.heading + self._fan_offsets
        depth = kernels.ray_fan(
            self.scene.segments,
            pos[0],
            pos[1],
            np.cos(angles),
            np.sin(angles),
            p.depth_clip,
        )
        depth_draws = self._rng.standard_normal(p.rays)
        if p.depth_noise_sigma > 0.0:
            depth = depth * (1.0 + p.depth_noise_sigma * depth_draws)
            depth = np.clip(depth, 1e-6, p.depth_clip)
        loc_draws = self._rng.standard_normal(2)
        believed = pos
        if p.localization_sigma > 0.0:
            believed = pos + p.localization_sigma * loc_draws
        gx = self._goal[0] - believed[0]
        gy = self._goal[1] - believed[1]
        r = math.hypot(gx, gy)
        azimuth = wrap_pi(math.atan2(gy, gx) - self._pose.heading) if r > 0 else 0.0
        return Observation(depth=depth, goal_r=r, goal_azimuth=azimuth)


def make_backend(
    backend_id, scene, params, seed, radius=DEFAULT_RADIUS, reference_profile=None
):
    """Create a backend. For reference_real the supplied params are ignored
    except for the sensor geometry (rays, fov, depth_clip) and the hidden
    reference profile applies; for test_sim params apply verbatim."""
    if backend_id == BackendId.REFERENCE_REAL:
        profile = reference_profile if reference_profile is not None else REFERENCE_PROFILE
        params = replace(
            profile, rays=params.rays, fov=params.fov, depth_clip=params.depth_clip
        )
    return Backend(backend_id, scene, params, seed, radius=radius)

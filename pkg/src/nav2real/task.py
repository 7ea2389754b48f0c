"""PointNav episode specification and runner.

An episode succeeds iff the agent issues stop within success_radius of the
goal (true distance). Path length is accumulated as the sum of Euclidean
hops between consecutive true positions, which is exactly the accounting
that lets sliding produce "better than optimal" paths: a hop across a
rounded corner undercounts the contour the agent actually traversed.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from nav2real.backend import Action, make_backend
from nav2real.errors import DomainError
from nav2real.geometry import Pose, Scene, geodesic_distance, is_navigable


class Termination:
    STOPPED_SUCCESS = "stopped_success"
    STOPPED_FAILURE = "stopped_failure"
    STEP_LIMIT = "step_limit"
    COLLISION_LIMIT = "collision_limit"


@dataclass(frozen=True)
class Limits:
    max_steps: int = 200
    max_collisions: int = 40
    success_radius: float = 0.2

    def __post_init__(self):
        if self.max_steps <= 0 or self.max_collisions <= 0 or self.success_radius <= 0:
            raise DomainError("all limits must be positive")


@dataclass
class EpisodeSpec:
    scene_id: str
    start: Pose
    goal: np.ndarray
    geodesic_l: float

    def __post_init__(self):
        self.goal = np.asarray(self.goal, dtype=np.float64).reshape(2)
        if not (math.isfinite(self.geodesic_l) and self.geodesic_l > 0):
            raise DomainError("geodesic_l must be finite and positive")


@dataclass
class EpisodeOutcome:
    success: bool
    path_length: float
    geodesic_l: float
    spl: float
    steps: int
    collisions: int
    termination: str
    trajectory: list


@dataclass(frozen=True)
class Truth:
    """Ground-truth channel for map-privileged agents (oracle roster)."""

    scene: Scene
    pose: Pose
    goal: np.ndarray
    radius: float


def compute_spl(success, p, l):
    """Success weighted by normalized inverse path length: S * l / max(p, l)."""
    if l <= 0:
        raise DomainError("geodesic length must be positive")
    if p < 0:
        raise DomainError("path length must be non-negative")
    if not success:
        return 0.0
    return l / max(p, l)


def run_episode(backend, agent, spec, limits, episode=0):
    """Run observe->act->step until stop or a limit fires.

    An invalid action emitted by the agent ends the episode as a failure
    (termination stopped_failure). Collisions beyond max_collisions end it
    as collision_limit, so the recorded count can reach max_collisions + 1.
    """
    backend.reset(spec.start, spec.goal, episode)
    rng = np.random.default_rng(np.random.SeedSequence([backend.seed, int(episode), 1]))
    truth = Truth(backend.scene, backend.pose, backend.goal, backend.radius)
    agent.reset(rng, truth)

    trajectory = [backend.pose]
    path_length = 0.0
    collisions = 0
    steps = 0
    success = False
    termination = None

    obs = backend.observe()
    while steps < limits.max_steps:
        truth = Truth(backend.scene, backend.pose, backend.goal, backend.radius)
        action = agent.act(obs, truth)
        steps += 1
        if action not in Action.ALL:
            termination = Termination.STOPPED_FAILURE
            break
        if action == Action.STOP:
            success = backend.true_goal_distance() <= limits.success_radius
            backend.step(Action.STOP)
            termination = (
                Termination.STOPPED_SUCCESS if success else Termination.STOPPED_FAILURE
            )
            break
        before = backend.pose.position
        obs, collided = backend.step(action)
        after = backend.pose
        path_length += math.hypot(
            after.position[0] - before[0], after.position[1] - before[1]
        )
        trajectory.append(after)
        if collided:
            collisions += 1
            if collisions > limits.max_collisions:
                termination = Termination.COLLISION_LIMIT
                break
    if termination is None:
        termination = Termination.STEP_LIMIT

    return EpisodeOutcome(
        success=success,
        path_length=path_length,
        geodesic_l=spec.geodesic_l,
        spl=compute_spl(success, path_length, spec.geodesic_l),
        steps=steps,
        collisions=collisions,
        termination=termination,
        trajectory=trajectory,
    )


@dataclass
class Waypoint:
    name: str
    pose: Pose


@dataclass
class SceneConfig:
    """One room configuration: a scene plus its 5 named waypoints."""

    scene: Scene
    waypoints: list
    agent_radius: float = 0.175
    limits: Limits = field(default_factory=Limits)

    def __post_init__(self):
        if len(self.waypoints) != 5:
            raise DomainError("a configuration requires exactly 5 waypoints")
        for wp in self.waypoints:
            if not is_navigable(self.scene, wp.pose.position, self.agent_radius):
                raise DomainError(
                    f"waypoint {wp.name} of {self.scene.name} is not navigable"
                )

    def legs(self):
        """Cyclic legs A->B->C->D->E->A."""
        out = []
        n = len(self.waypoints)
        for i in range(n):
            a = self.waypoints[i]
            b = self.waypoints[(i + 1) % n]
            out.append((a, b))
        return out


@dataclass
class ScenarioSuite:
    configurations: list
    trials: int = 3

    def __post_init__(self):
        if self.trials <= 0:
            raise DomainError("trials must be positive")


@dataclass(frozen=True)
class Job:
    index: int
    agent_id: str
    config_index: int
    leg_index: int
    leg_label: str
    trial: int


def expand_jobs(roster, suite):
    """Stable episode enumeration: agent-major, then configuration, leg,
    trial. The index keys every random stream, so it must not depend on
    worker scheduling or simulator parameters."""
    jobs = []
    index = 0
    for entry in roster:
        label = entry if isinstance(entry, str) else entry.__name__
        for ci, config in enumerate(suite.configurations):
            legs = config.legs()
            for li, (a, b) in enumerate(legs):
                for trial in range(suite.trials):
                    jobs.append(
                        Job(
                            index=index,
                            agent_id=label,
                            config_index=ci,
                            leg_index=li,
                            leg_label=f"{a.name}->{b.name}",
                            trial=trial,
                        )
                    )
                    index += 1
    return jobs


def leg_specs(suite):
    """EpisodeSpec per (configuration, leg), geodesics computed once."""
    specs = {}
    for ci, config in enumerate(suite.configurations):
        for li, (a, b) in enumerate(config.legs()):
            l = geodesic_distance(
                config.scene, a.pose.position, b.pose.position, config.agent_radius
            )
            specs[(ci, li)] = EpisodeSpec(
                scene_id=config.scene.name,
                start=a.pose,
                goal=b.pose.position,
                geodesic_l=l,
            )
    return specs


@dataclass
class EpisodeRecord:
    index: int
    agent_id: str
    scene: str
    leg: str
    trial: int
    outcome: EpisodeOutcome


@dataclass
class EvalResult:
    backend_id: str
    params_label: str
    seed: int
    records: list

    def agent_ids(self):
        seen = []
        for rec in self.records:
            if rec.agent_id not in seen:
                seen.append(rec.agent_id)
        return seen

    def agent_scores(self, agent_id, metric="spl"):
        vals = []
        for rec in self.records:
            if rec.agent_id != agent_id:
                continue
            if metric == "spl":
                vals.append(rec.outcome.spl)
            elif metric == "success":
                vals.append(1.0 if rec.outcome.success else 0.0)
            else:
                raise DomainError(f"unknown metric {metric!r}")
        return np.asarray(vals)

    def summary(self, metric="spl"):
        """Per-agent mean and standard error (sample std / sqrt(n))."""
        out = {}
        for agent_id in self.agent_ids():
            scores = self.agent_scores(agent_id, metric)
            n = len(scores)
            se = float(scores.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
            out[agent_id] = {"mean": float(scores.mean()), "se": se, "episodes": n}
        return out


def _make_agent(entry):
    if isinstance(entry, str):
        from nav2real.agents import make_agent

        return make_agent(entry)
    return entry()


def _run_one(factory, config, spec, job, entry, seed):
    backend = factory(config.scene, config.agent_radius, seed)
    agent = _make_agent(entry)
    outcome = run_episode(backend, agent, spec, config.limits, episode=job.index)
    outcome.trajectory = []  # not carried through suite aggregation
    return EpisodeRecord(
        index=job.index,
        agent_id=job.agent_id,
        scene=config.scene.name,
        leg=job.leg_label,
        trial=job.trial,
        outcome=outcome,
    )


def _worker(args):
    return _run_one(*args)


def run_suite(factory, roster, suite, seed, workers=1):
    """Run every (agent x configuration x leg x trial) episode.

    `factory(scene, radius, seed)` builds a backend; `roster` is a list of
    agent ids (see agents.ROSTER) or agent classes. Episodes carry stable
    indices so results are identical no matter how many workers execute
    them.
    """
    jobs = expand_jobs(roster, suite)
    specs = leg_specs(suite)
    per_agent = len(jobs) // len(roster) if roster else 0
    args = [
        (
            factory,
            suite.configurations[j.config_index],
            specs[(j.config_index, j.leg_index)],
            j,
            roster[j.index // per_agent],
            seed,
        )
        for j in jobs
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_worker, args, chunksize=16))
    else:
        records = [_run_one(*a) for a in args]
    records.sort(key=lambda r: r.index)
    return EvalResult(
        backend_id=factory.backend_id,
        params_label=factory.label(),
        seed=seed,
        records=records,
    )


@dataclass(frozen=True)
class BackendFactory:
    """Picklable backend constructor used by run_suite workers."""

    backend_id: str
    params: object
    reference_profile: object = None

    def __call__(self, scene, radius, seed):
        return make_backend(
            self.backend_id,
            scene,
            self.params,
            seed,
            radius=radius,
            reference_profile=self.reference_profile,
        )

    def label(self):
        from nav2real.backend import BackendId

        if self.backend_id == BackendId.REFERENCE_REAL:
            return "reference"
        return self.params.label()

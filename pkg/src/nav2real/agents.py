"""Nine deterministic-policy navigation controllers spanning a performance
spectrum, from a map-privileged wall-following oracle down to a random
walker. All agents share one interface (act(observation, truth) -> action)
and run unmodified on either backend; per-episode memory is reset at episode
start so nothing leaks between runs.

The roster deliberately includes sim-optimistic controllers: `greedy` and
`slide_exploiter` press into obstacles and profit from sliding collision
response, which is exactly the behavior that fails on a stop-on-contact
backend.
"""

from __future__ import annotations

import math

import numpy as np

from nav2real.backend import Action
from nav2real.errors import DomainError
from nav2real.geometry import resolve_move, shortest_path, wrap_pi

ALIGN_TOLERANCE = math.pi / 12.0  # 15 degrees


def _turn_toward(azimuth):
    return Action.TURN_LEFT if azimuth > 0 else Action.TURN_RIGHT


def _front_depth(depth):
    n = len(depth)
    lo = max(0, n // 2 - 2)
    return float(depth[lo : lo + 5].min())


def _side_means(depth):
    n = len(depth)
    right = float(depth[: n // 2].mean())
    left = float(depth[n // 2 :].mean())
    return left, right


class NavAgent:
    """Base controller: per-episode state lives on the instance and is
    rebuilt by reset()."""

    name = "base"
    uses_truth = False
    stop_radius = 0.2

    def reset(self, rng, truth):
        self._rng = rng

    def act(self, obs, truth):
        raise NotImplementedError


class Greedy(NavAgent):
    """Turn toward the goal and walk straight at it, ignoring depth. Profits
    from sliding around obstacles; gets stuck on them when collisions stop."""

    name = "greedy"

    def act(self, obs, truth):
        if obs.goal_r <= self.stop_radius:
            return Action.STOP
        if abs(obs.goal_azimuth) > ALIGN_TOLERANCE:
            return _turn_toward(obs.goal_azimuth)
        return Action.FORWARD


class GreedyCautious(NavAgent):
    """Greedy, but never moves forward when the center rays read < 0.4 m;
    commits to a short avoidance arc toward the freer side instead."""

    name = "greedy_cautious"
    caution = 0.4
    sight = None

    def reset(self, rng, truth):
        super().reset(rng, truth)
        self._avoid_dir = None
        self._commit = 0

    def act(self, obs, truth):
        if obs.goal_r <= self.stop_radius:
            return Action.STOP
        depth = obs.depth
        if self.sight is not None:
            depth = np.minimum(depth, self.sight)
        if _front_depth(depth) < self.caution:
            if self._avoid_dir is None:
                left, right = _side_means(depth)
                self._avoid_dir = Action.TURN_LEFT if left > right else Action.TURN_RIGHT
            self._commit = 3
            return self._avoid_dir
        if self._commit > 0:
            self._commit -= 1
            return Action.FORWARD
        self._avoid_dir = None
        if abs(obs.goal_azimuth) > ALIGN_TOLERANCE:
            return _turn_toward(obs.goal_azimuth)
        return Action.FORWARD


class ShortSightGreedy(GreedyCautious):
    """Cautious controller whose depth sensing saturates at 2 m, so distant
    structure is invisible and avoidance choices degrade."""

    name = "short_sight_greedy"
    sight = 2.0


class _Bug(NavAgent):
    """Bug-2 style controller with a fixed follow side.

    Keeps a dead-reckoned pose from commanded actions (it never sees the
    actuation noise), heads for the goal along the start-goal line, and on
    hitting an obstacle follows the wall on its preferred side until it is
    back near the line and closer to the goal than at the hit point.
    """

    follow_side = "left"
    hit_threshold = 0.5
    near_wall = 0.3
    far_wall = 0.9

    def reset(self, rng, truth):
        super().reset(rng, truth)
        self._x = 0.0
        self._y = 0.0
        self._h = 0.0
        self._goal_est = None
        self._mode = "to_goal"
        self._hit_r = None
        self._follow_steps = 0

    def _commit(self, action):
        if action == Action.FORWARD:
            self._x += 0.25 * math.cos(self._h)
            self._y += 0.25 * math.sin(self._h)
        elif action == Action.TURN_LEFT:
            self._h += math.pi / 6.0
        elif action == Action.TURN_RIGHT:
            self._h -= math.pi / 6.0
        return action

    def _mline_distance(self):
        gx, gy = self._goal_est
        norm = math.hypot(gx, gy)
        if norm == 0:
            return 0.0
        return abs(gx * self._y - gy * self._x) / norm

    def act(self, obs, truth):
        if obs.goal_r <= self.stop_radius:
            return Action.STOP
        if self._goal_est is None:
            ang = self._h + obs.goal_azimuth
            self._goal_est = (
                self._x + obs.goal_r * math.cos(ang),
                self._y + obs.goal_r * math.sin(ang),
            )
        front = _front_depth(obs.depth)
        n = len(obs.depth)
        if self.follow_side == "left":
            wall = float(obs.depth[: n // 3].min())  # wall kept on the right
            away, toward = Action.TURN_LEFT, Action.TURN_RIGHT
        else:
            wall = float(obs.depth[-(n // 3) :].min())
            away, toward = Action.TURN_RIGHT, Action.TURN_LEFT

        if self._mode == "to_goal":
            if front < self.hit_threshold and abs(obs.goal_azimuth) < math.pi / 2:
                self._mode = "follow"
                self._hit_r = obs.goal_r
                self._follow_steps = 0
                return self._commit(away)
            if abs(obs.goal_azimuth) > ALIGN_TOLERANCE:
                return self._commit(_turn_toward(obs.goal_azimuth))
            return self._commit(Action.FORWARD)

        # follow mode
        self._follow_steps += 1
        if (
            self._follow_steps > 3
            and self._mline_distance() < 0.15
            and obs.goal_r < self._hit_r - 0.1
        ):
            self._mode = "to_goal"
            return self._commit(_turn_toward(obs.goal_azimuth))
        if front < self.near_wall:
            return self._commit(away)
        if wall > self.far_wall:
            return self._commit(toward)
        return self._commit(Action.FORWARD)


class BugLeft(_Bug):
    name = "bug_left"
    follow_side = "left"


class BugRight(_Bug):
    name = "bug_right"
    follow_side = "right"


class OracleWallFollower(NavAgent):
    """Map-privileged oracle: plans the shortest disc path over the scene
    map, then tracks it, checking every forward against the map with a
    safety margin so it never collides on either backend.

    The plan uses an inflated radius so the tracked path keeps real
    clearance from walls; if the inflated plan is disconnected the margin
    shrinks until it fits.
    """

    name = "oracle_wall_follower"
    uses_truth = True
    stop_radius = 0.15
    plan_margin = 0.10
    # Bounds on one noisy forward step: |along| <= 0.25 + ~5 sigma.
    sweep_length = 0.36
    sweep_margin = 0.06

    def reset(self, rng, truth):
        super().reset(rng, truth)
        self._plan = None
        self._wp = 1
        margin = self.plan_margin
        while self._plan is None and margin >= 0.0:
            length, path = shortest_path(
                truth.scene,
                truth.pose.position,
                truth.goal,
                truth.radius + margin,
            )
            if math.isfinite(length):
                self._plan = path
            margin -= 0.05
        if self._plan is None:
            self._plan = [truth.pose.position, truth.goal]

    def act(self, obs, truth):
        pos = truth.pose.position
        goal = truth.goal
        if math.hypot(goal[0] - pos[0], goal[1] - pos[1]) <= self.stop_radius:
            return Action.STOP
        while self._wp < len(self._plan) - 1:
            t = self._plan[self._wp]
            if math.hypot(t[0] - pos[0], t[1] - pos[1]) < 0.3:
                self._wp += 1
            else:
                break
        target = self._plan[self._wp]
        desired = math.atan2(target[1] - pos[1], target[0] - pos[0])
        az = wrap_pi(desired - truth.pose.heading)
        if abs(az) > ALIGN_TOLERANCE:
            return _turn_toward(az)
        h = truth.pose.heading
        sweep = np.array(
            [self.sweep_length * math.cos(h), self.sweep_length * math.sin(h)]
        )
        _, blocked = resolve_move(
            truth.scene, truth.pose, sweep, truth.radius + self.sweep_margin, "stop"
        )
        if blocked:
            # Off plan and facing a wall: rotate toward the freer side.
            left, right = _side_means(obs.depth)
            return Action.TURN_LEFT if left > right else Action.TURN_RIGHT
        return Action.FORWARD


class SlideExploiter(NavAgent):
    """Presses into obstacles toward the goal. With sliding on, the pressed
    motion is redirected along walls and around corners; with stop-on-contact
    the same pressing burns the collision budget and the agent fails."""

    name = "slide_exploiter"

    def reset(self, rng, truth):
        super().reset(rng, truth)
        self._prev_r = None
        self._last_forward = False
        self._press = 0

    def _ret(self, action):
        self._last_forward = action == Action.FORWARD
        return action

    def act(self, obs, truth):
        if obs.goal_r <= self.stop_radius:
            return self._ret(Action.STOP)
        stalled = (
            self._last_forward
            and self._prev_r is not None
            and self._prev_r - obs.goal_r < 0.005
        )
        self._prev_r = obs.goal_r
        if self._press > 0:
            self._press -= 1
            return self._ret(Action.FORWARD)
        if stalled:
            left, right = _side_means(obs.depth)
            self._press = 2
            return self._ret(
                Action.TURN_LEFT if left > right else Action.TURN_RIGHT
            )
        if abs(obs.goal_azimuth) > math.pi / 4:
            return self._ret(_turn_toward(obs.goal_azimuth))
        return self._ret(Action.FORWARD)


class NoisyGreedy(Greedy):
    """Greedy with a 0.2 probability of a uniformly random turn each step."""

    name = "noisy_greedy"
    blunder_rate = 0.2

    def act(self, obs, truth):
        u = self._rng.random()
        if u < self.blunder_rate:
            return Action.TURN_LEFT if self._rng.random() < 0.5 else Action.TURN_RIGHT
        return super().act(obs, truth)


class RandomWalker(NavAgent):
    """Fixed action distribution: 25% turn left, 25% turn right, 45%
    forward, 5% stop."""

    name = "random_walker"

    def act(self, obs, truth):
        u = self._rng.random()
        if u < 0.25:
            return Action.TURN_LEFT
        if u < 0.5:
            return Action.TURN_RIGHT
        if u < 0.95:
            return Action.FORWARD
        return Action.STOP


ROSTER = (
    "greedy",
    "greedy_cautious",
    "bug_left",
    "bug_right",
    "oracle_wall_follower",
    "slide_exploiter",
    "noisy_greedy",
    "short_sight_greedy",
    "random_walker",
)

_REGISTRY = {
    cls.name: cls
    for cls in (
        Greedy,
        GreedyCautious,
        BugLeft,
        BugRight,
        OracleWallFollower,
        SlideExploiter,
        NoisyGreedy,
        ShortSightGreedy,
        RandomWalker,
    )
}


def make_agent(agent_id):
    """Instantiate a roster agent by id."""
    try:
        return _REGISTRY[agent_id]()
    except KeyError:
        raise DomainError(f"unknown agent id {agent_id!r}") from None

"""Planar geometry kernel: polygonal scenes, ray casting, disc-robot
collision resolution, and disc geodesics on a visibility graph.

Distances are meters, angles radians. The world is a simple counter-
clockwise boundary polygon plus convex polygonal obstacles strictly inside
it. A single contact tolerance (CONTACT_EPS = 1e-6 m) governs navigability
slack everywhere.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np
import shapely
from shapely.geometry import LineString, Point, Polygon

from nav2real import kernels
from nav2real.errors import DomainError

CONTACT_EPS = 1e-6
TWO_PI = 2.0 * math.pi

# Segments per quarter circle when rounding inflated obstacle corners for
# the visibility graph (>= 8 vertices per typical box corner).
CORNER_SEGMENTS = 8


def normalize_angle(angle):
    """Wrap an angle to [0, 2*pi)."""
    a = math.fmod(angle, TWO_PI)
    if a < 0.0:
        a += TWO_PI
    return a


def wrap_pi(angle):
    """Wrap an angle to (-pi, pi]."""
    a = math.fmod(angle, TWO_PI)
    if a > math.pi:
        a -= TWO_PI
    elif a <= -math.pi:
        a += TWO_PI
    return a


def _as_point(value, name="point"):
    p = np.asarray(value, dtype=np.float64).reshape(2)
    if not np.all(np.isfinite(p)):
        raise DomainError(f"{name} has non-finite components: {value!r}")
    return p


@dataclass
class Pose:
    """Agent position and heading; heading is normalized to [0, 2*pi)."""

    position: np.ndarray
    heading: float = 0.0

    def __post_init__(self):
        self.position = _as_point(self.position, "position")
        if not math.isfinite(self.heading):
            raise DomainError(f"non-finite heading: {self.heading!r}")
        self.heading = normalize_angle(float(self.heading))

    def __eq__(self, other):
        if not isinstance(other, Pose):
            return NotImplemented
        return (
            bool(np.array_equal(self.position, other.position))
            and self.heading == other.heading
        )


def _ring_array(vertices, name):
    ring = np.asarray(vertices, dtype=np.float64)
    if ring.ndim != 2 or ring.shape[1] != 2 or ring.shape[0] < 3:
        raise DomainError(f"{name} must be an (n>=3, 2) vertex list")
    if not np.all(np.isfinite(ring)):
        raise DomainError(f"{name} has non-finite vertices")
    return ring


def _signed_area(ring):
    x = ring[:, 0]
    y = ring[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _is_simple(ring):
    """True iff no two non-adjacent edges intersect (O(n^2) exact check)."""
    n = len(ring)
    edges = [(ring[i], ring[(i + 1) % n]) for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            adjacent = j == i + 1 or (i == 0 and j == n - 1)
            if adjacent:
                continue
            if _segments_intersect(*edges[i], *edges[j]):
                return False
    return True


def _segments_intersect(p1, p2, q1, q2):
    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    d1 = orient(q1, q2, p1)
    d2 = orient(q1, q2, p2)
    d3 = orient(p1, p2, q1)
    d4 = orient(p1, p2, q2)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)):
        return True

    def on_seg(a, b, c):
        return (
            min(a[0], b[0]) <= c[0] <= max(a[0], b[0])
            and min(a[1], b[1]) <= c[1] <= max(a[1], b[1])
        )

    if d1 == 0 and on_seg(q1, q2, p1):
        return True
    if d2 == 0 and on_seg(q1, q2, p2):
        return True
    if d3 == 0 and on_seg(p1, p2, q1):
        return True
    if d4 == 0 and on_seg(p1, p2, q2):
        return True
    return False


def _is_convex(ring):
    n = len(ring)
    sign = 0
    for i in range(n):
        a, b, c = ring[i], ring[(i + 1) % n], ring[(i + 2) % n]
        cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0])
        if cross != 0:
            s = 1 if cross > 0 else -1
            if sign == 0:
                sign = s
            elif s != sign:
                return False
    return True


@dataclass(eq=False)
class Scene:
    """Polygonal world: CCW boundary plus convex obstacles strictly inside.

    Validation runs on construction; flattened edge/ring arrays for the
    kernels are built once and reused by every query.
    """

    name: str
    boundary: np.ndarray
    obstacles: list = field(default_factory=list)

    def __post_init__(self):
        self.boundary = _ring_array(self.boundary, "boundary")
        self.obstacles = [
            _ring_array(o, f"obstacle[{i}]") for i, o in enumerate(self.obstacles)
        ]
        self._validate()
        # Normalize obstacle orientation to CCW for consistent edge normals.
        self.obstacles = [
            o if _signed_area(o) > 0 else o[::-1].copy() for o in self.obstacles
        ]
        rings = [self.boundary] + self.obstacles
        self.rings_flat = np.ascontiguousarray(np.vstack(rings))
        self.ring_starts = np.cumsum([0] + [len(r) for r in rings]).astype(np.int64)
        segs = []
        for ring in rings:
            nxt = np.roll(ring, -1, axis=0)
            segs.append(np.hstack([ring, nxt]))
        self.segments = np.ascontiguousarray(np.vstack(segs))
        self._path_cache = {}

    def _validate(self):
        if _signed_area(self.boundary) <= 0:
            raise DomainError("boundary must be counter-clockwise")
        if not _is_simple(self.boundary):
            raise DomainError("boundary polygon is self-intersecting")
        boundary_poly = Polygon(self.boundary)
        obstacle_polys = []
        for i, ring in enumerate(self.obstacles):
            if not _is_convex(ring):
                raise DomainError(f"obstacle[{i}] is not convex")
            poly = Polygon(ring)
            if not (
                boundary_poly.contains(poly)
                and boundary_poly.exterior.distance(poly) > 0
            ):
                raise DomainError(f"obstacle[{i}] is not strictly inside the boundary")
            obstacle_polys.append(poly)
        for i in range(len(obstacle_polys)):
            for j in range(i + 1, len(obstacle_polys)):
                inter = obstacle_polys[i].intersection(obstacle_polys[j])
                if inter.area > 0:
                    raise DomainError(f"obstacles {i} and {j} overlap")

    def __eq__(self, other):
        if not isinstance(other, Scene):
            return NotImplemented
        return (
            self.name == other.name
            and np.array_equal(self.boundary, other.boundary)
            and len(self.obstacles) == len(other.obstacles)
            and all(
                np.array_equal(a, b) for a, b in zip(self.obstacles, other.obstacles)
            )
        )

    def __getstate__(self):
        # The path cache holds prepared shapely geometry; workers rebuild it.
        state = dict(self.__dict__)
        state["_path_cache"] = {}
        return state

    def __setstate__(self, state):
        self.__dict__.update(state)

    def contains(self, point):
        p = _as_point(point)
        b0, b1 = int(self.ring_starts[0]), int(self.ring_starts[1])
        return bool(kernels.point_in_ring(self.rings_flat[b0:b1], p[0], p[1]))


def ray_cast(scene, origin, direction, max_range):
    """Distance to the nearest obstacle/boundary along a unit-direction ray,
    clipped to max_range."""
    o = _as_point(origin, "origin")
    d = _as_point(direction, "direction")
    if abs(math.hypot(d[0], d[1]) - 1.0) > 1e-6:
        raise DomainError("direction must have unit norm")
    if max_range <= 0:
        raise DomainError("max_range must be positive")
    if not scene.contains(o):
        raise DomainError("ray origin is outside the scene boundary")
    return kernels.ray_cast(scene.segments, o[0], o[1], d[0], d[1], float(max_range))


def ray_fan(scene, origin, heading, fov, count, max_range):
    """Fan of `count` ray distances spanning `fov` centered on `heading`.

    Index 0 is the rightmost ray (heading - fov/2), the last index the
    leftmost. No precondition checks: this is the sensor hot path and the
    backend guarantees pose validity.
    """
    angles = heading + np.linspace(-fov / 2.0, fov / 2.0, count)
    return kernels.ray_fan(
        scene.segments,
        float(origin[0]),
        float(origin[1]),
        np.cos(angles),
        np.sin(angles),
        float(max_range),
    )


def is_navigable(scene, point, radius):
    """True iff a disc of the given radius centered at point fits in the
    free space (inside boundary, outside obstacles, clearance >= radius)."""
    if radius < 0:
        raise DomainError("radius must be non-negative")
    p = _as_point(point)
    return bool(
        kernels.navigable(
            scene.segments,
            scene.rings_flat,
            scene.ring_starts,
            p[0],
            p[1],
            float(radius),
        )
    )


def clearance(scene, point):
    """Minimum distance from a point to any edge of the scene."""
    p = _as_point(point)
    return kernels.min_clearance(scene.segments, p[0], p[1])


def resolve_move(scene, pose, displacement, radius, mode):
    """Move a disc by `displacement`, resolving collisions.

    mode "slide" removes the obstacle-normal motion component at contact
    (up to 3 contact constraints per move, leftover motion dropped); mode
    "stop" cancels the whole displacement on any contact. Returns
    (new_position, collided).
    """
    if mode not in ("slide", "stop"):
        raise DomainError(f"unknown collision mode: {mode!r}")
    pos = pose.position if isinstance(pose, Pose) else _as_point(pose, "pose")
    d = _as_point(displacement, "displacement")
    if not is_navigable(scene, pos, max(0.0, radius - CONTACT_EPS)):
        raise DomainError("start pose is not navigable at the given radius")
    x, y, collided = kernels.resolve_move(
        scene.segments, pos[0], pos[1], d[0], d[1], float(radius), mode == "slide"
    )
    return np.array([x, y]), bool(collided)


def _free_space(scene, radius):
    """Offset free space for a disc: boundary eroded and obstacles inflated
    by `radius`, corners rounded polygonally (vertices on the true arc)."""
    boundary = Polygon(scene.boundary)
    if radius > 0:
        free = boundary.buffer(-radius, quad_segs=CORNER_SEGMENTS)
    else:
        free = boundary
    for ring in scene.obstacles:
        blocked = Polygon(ring)
        if radius > 0:
            blocked = blocked.buffer(radius, quad_segs=CORNER_SEGMENTS)
        free = free.difference(blocked)
    return free


def _graph_nodes(free):
    nodes = []
    polys = getattr(free, "geoms", [free])
    for poly in polys:
        if poly.is_empty:
            continue
        for ring in [poly.exterior] + list(poly.interiors):
            coords = np.asarray(ring.coords)[:-1]
            nodes.extend(coords)
    return nodes


def _visibility(free, a, b):
    if a[0] == b[0] and a[1] == b[1]:
        return True
    return free.covers(LineString([tuple(a), tuple(b)]))


def _path_graph(scene, radius):
    key = float(radius)
    cached = scene._path_cache.get(key)
    if cached is not None:
        return cached
    free = _free_space(scene, radius)
    shapely.prepare(free)
    nodes = _graph_nodes(free)
    n = len(nodes)
    adjacency = [[] for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if _visibility(free, nodes[i], nodes[j]):
                w = math.hypot(
                    nodes[j][0] - nodes[i][0], nodes[j][1] - nodes[i][1]
                )
                adjacency[i].append((j, w))
                adjacency[j].append((i, w))
    cached = (free, nodes, adjacency)
    scene._path_cache[key] = cached
    return cached


def shortest_path(scene, a, b, radius):
    """Shortest navigable path for a disc between two points.

    Returns (length, waypoints). Disconnected endpoints yield
    (math.inf, []). Both endpoints must be navigable at the given radius.
    """
    a = _as_point(a, "a")
    b = _as_point(b, "b")
    for name, p in (("a", a), ("b", b)):
        if not is_navigable(scene, p, radius):
            raise DomainError(f"endpoint {name} is not navigable at radius {radius}")
    if a[0] == b[0] and a[1] == b[1]:
        return 0.0, [a.copy(), b.copy()]

    free, nodes, adjacency = _path_graph(scene, radius)
    if _visibility(free, a, b):
        return float(math.hypot(b[0] - a[0], b[1] - a[1])), [a.copy(), b.copy()]

    n = len(nodes)
    points = nodes + [tuple(a), tuple(b)]
    adj = [list(edges) for edges in adjacency] + [[], []]
    src, dst = n, n + 1
    for i in range(n):
        if _visibility(free, points[src], nodes[i]):
            w = math.hypot(nodes[i][0] - a[0], nodes[i][1] - a[1])
            adj[src].append((i, w))
            adj[i].append((src, w))
        if _visibility(free, points[dst], nodes[i]):
            w = math.hypot(nodes[i][0] - b[0], nodes[i][1] - b[1])
            adj[dst].append((i, w))
            adj[i].append((dst, w))

    dist = [math.inf] * (n + 2)
    prev = [-1] * (n + 2)
    dist[src] = 0.0
    queue = [(0.0, src)]
    while queue:
        d, u = heapq.heappop(queue)
        if d > dist[u]:
            continue
        if u == dst:
            break
        for v, w in adj[u]:
            nd = d + w
            if nd < dist[v]:
                dist[v] = nd
                prev[v] = u
                heapq.heappush(queue, (nd, v))
    if not math.isfinite(dist[dst]):
        return math.inf, []
    path = []
    u = dst
    while u != -1:
        path.append(np.asarray(points[u], dtype=np.float64))
        u = prev[u]
    path.reverse()
    return dist[dst], path


def geodesic_distance(scene, a, b, radius):
    """Length of the shortest navigable disc path; math.inf if disconnected."""
    return shortest_path(scene, a, b, radius)[0]

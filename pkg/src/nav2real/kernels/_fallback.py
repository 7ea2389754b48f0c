"""Pure-numpy geometry kernels, used when the compiled extension is absent.

Scene geometry arrives as flat arrays prepared by `geometry.Scene`:

  segments    (M, 4) float64, rows [ax, ay, bx, by]; every edge of the world
  rings_flat  (K, 2) float64, vertices of all rings, boundary ring first
  ring_starts (R+1,) int64, ring i is rings_flat[ring_starts[i]:ring_starts[i+1]]

`kernels._native` implements the same functions with the same arithmetic
(scalar loops instead of vector ops), so the two backends produce identical
trajectories and either can serve the test suite.
"""

from __future__ import annotations

import numpy as np

# Contact detection band around the disc surface; well below the 1e-6 m
# tolerance used for navigability checks.
SKIN = 1e-9
APPROACH_EPS = 1e-12


def ray_cast(segments, ox, oy, dx, dy, max_range):
    """Distance from (ox, oy) along unit direction (dx, dy) to the nearest
    segment, clipped to max_range."""
    ax = segments[:, 0]
    ay = segments[:, 1]
    ux = segments[:, 2] - ax
    uy = segments[:, 3] - ay
    wx = ax - ox
    wy = ay - oy
    denom = dx * uy - dy * ux
    with np.errstate(divide="ignore", invalid="ignore"):
        t = (wx * uy - wy * ux) / denom
        s = (wx * dy - wy * dx) / denom
    valid = (denom != 0.0) & (t >= 0.0) & (s >= 0.0) & (s <= 1.0)
    t = np.where(valid, t, np.inf)
    best = t.min() if t.size else np.inf
    return float(min(best, max_range))


def ray_fan(segments, ox, oy, dirx, diry, max_range):
    """Vector of ray_cast results for precomputed unit directions."""
    ax = segments[:, 0]
    ay = segments[:, 1]
    ux = segments[:, 2] - ax
    uy = segments[:, 3] - ay
    wx = ax - ox
    wy = ay - oy
    dx = dirx[:, None]
    dy = diry[:, None]
    denom = dx * uy - dy * ux
    with np.errstate(divide="ignore", invalid="ignore"):
        t = (wx * uy - wy * ux) / denom
        s = (wx * dy - wy * dx) / denom
    valid = (denom != 0.0) & (t >= 0.0) & (s >= 0.0) & (s <= 1.0)
    t = np.where(valid, t, np.inf)
    out = t.min(axis=1) if segments.shape[0] else np.full(len(dirx), np.inf)
    return np.minimum(out, max_range)


def min_clearance(segments, px, py):
    """Minimum distance from a point to any segment."""
    ax = segments[:, 0]
    ay = segments[:, 1]
    ux = segments[:, 2] - ax
    uy = segments[:, 3] - ay
    l2 = ux * ux + uy * uy
    wx = px - ax
    wy = py - ay
    safe = np.where(l2 > 0.0, l2, 1.0)
    s = np.clip((wx * ux + wy * uy) / safe, 0.0, 1.0)
    cx = wx - s * ux
    cy = wy - s * uy
    d2 = cx * cx + cy * cy
    return float(np.sqrt(d2.min())) if d2.size else np.inf


def point_in_ring(ring, px, py):
    """Even-odd crossing test for a closed polygon ring (n, 2)."""
    x = ring[:, 0]
    y = ring[:, 1]
    x2 = np.roll(x, -1)
    y2 = np.roll(y, -1)
    straddle = (y <= py) != (y2 <= py)
    with np.errstate(divide="ignore", invalid="ignore"):
        xint = x + (py - y) * (x2 - x) / (y2 - y)
    crossings = straddle & (px < xint)
    return bool(crossings.sum() % 2 == 1)


def navigable(segments, rings_flat, ring_starts, px, py, radius):
    """True iff the point is inside the boundary, outside every obstacle,
    and at clearance >= radius from every edge."""
    b0 = int(ring_starts[0])
    b1 = int(ring_starts[1])
    if not point_in_ring(rings_flat[b0:b1], px, py):
        return False
    for k in range(1, len(ring_starts) - 1):
        r0 = int(ring_starts[k])
        r1 = int(ring_starts[k + 1])
        if point_in_ring(rings_flat[r0:r1], px, py):
            return False
    if radius > 0.0 and min_clearance(segments, px, py) < radius:
        return False
    return True


def first_contact(segments, px, py, dx, dy, radius):
    """Earliest contact of a disc of given radius moving along (dx, dy).

    Returns (t, nx, ny, hit) where t in [0, 1] is the motion fraction at
    contact and (nx, ny) the outward contact normal. hit == 0 means the
    full motion is free.

    Each segment contributes up to four candidate contacts, scanned in a
    fixed order so ties resolve identically in both kernel backends:
    already-in-contact, edge face crossing, endpoint circle A, circle B.
    """
    m = segments.shape[0]
    if m == 0:
        return 1.0, 0.0, 0.0, 0
    ax = segments[:, 0]
    ay = segments[:, 1]
    ux = segments[:, 2] - ax
    uy = segments[:, 3] - ay
    l2 = ux * ux + uy * uy
    safe_l2 = np.where(l2 > 0.0, l2, 1.0)
    wx = px - ax
    wy = py - ay

    # Closest feature at t = 0.
    s0 = np.clip((wx * ux + wy * uy) / safe_l2, 0.0, 1.0)
    ox = wx - s0 * ux
    oy = wy - s0 * uy
    dist0 = np.sqrt(ox * ox + oy * oy)
    in_contact = dist0 <= radius + SKIN

    t_cand = np.full((m, 4), np.inf)
    n_cand = np.zeros((m, 4, 2))

    # Candidate 0: already touching and moving inward. The capsule is
    # convex, so a non-approaching touching disc can never re-enter within
    # this motion and the other candidates are skipped for such segments.
    tiny = dist0 > 1e-15
    n0x = np.where(tiny, ox / np.where(tiny, dist0, 1.0), 0.0)
    n0y = np.where(tiny, oy / np.where(tiny, dist0, 1.0), 0.0)
    appr = dx * n0x + dy * n0y
    c0 = in_contact & tiny & (appr < -APPROACH_EPS)
    t_cand[:, 0] = np.where(c0, 0.0, np.inf)
    n_cand[:, 0, 0] = n0x
    n_cand[:, 0, 1] = n0y

    free = ~in_contact

    # Candidate 1: crossing of an offset edge face.
    ulen = np.sqrt(safe_l2)
    enx = -uy / ulen
    eny = ux / ulen
    f0 = wx * enx + wy * eny
    fd = dx * enx + dy * eny
    sgn = np.where(f0 >= 0.0, 1.0, -1.0)
    ok = free & (l2 > 0.0) & (np.abs(f0) > radius) & (sgn * fd < 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        t_face = np.where(ok, (sgn * radius - f0) / np.where(fd != 0.0, fd, 1.0), np.inf)
        pxt = wx + np.where(ok, t_face, 0.0) * dx
        pyt = wy + np.where(ok, t_face, 0.0) * dy
        s_face = (pxt * ux + pyt * uy) / safe_l2
    ok &= (t_face >= 0.0) & (t_face <= 1.0) & (s_face >= 0.0) & (s_face <= 1.0)
    t_cand[:, 1] = np.where(ok, t_face, np.inf)
    n_cand[:, 1, 0] = sgn * enx
    n_cand[:, 1, 1] = sgn * eny

    # Candidates 2, 3: entry through the endpoint circles (radius > 0 only;
    # with a zero radius the face crossing is the only meaningful contact).
    if radius > 0.0:
        a = dx * dx + dy * dy
        for col, (ex, ey, end_sign) in enumerate(
            ((wx, wy, 1.0), (px - segments[:, 2], py - segments[:, 3], -1.0)),
            start=2,
        ):
            b = 2.0 * (ex * dx + ey * dy)
            c = ex * ex + ey * ey - radius * radius
            disc = b * b - 4.0 * a * c
            okc = free & (disc >= 0.0) & (a > 0.0)
            sq = np.sqrt(np.where(okc, disc, 0.0))
            with np.errstate(divide="ignore", invalid="ignore"):
                t_c = np.where(okc, (-b - sq) / (2.0 * a), 0.0)
            hxt = ex + t_c * dx
            hyt = ey + t_c * dy
            # Contact must land on the arc owned by this endpoint.
            okc &= (t_c >= 0.0) & (t_c <= 1.0)
            okc &= end_sign * (hxt * ux + hyt * uy) <= 0.0
            t_cand[:, col] = np.where(okc, t_c, np.inf)
            n_cand[:, col, 0] = hxt / radius
            n_cand[:, col, 1] = hyt / radius

    flat = t_cand.ravel()
    idx = int(flat.argmin())
    if not np.isfinite(flat[idx]):
        return 1.0, 0.0, 0.0, 0
    i, j = divmod(idx, 4)
    return float(t_cand[i, j]), float(n_cand[i, j, 0]), float(n_cand[i, j, 1]), 1


def resolve_move(segments, px, py, dx, dy, radius, slide):
    """Resolve a disc displacement against the scene.

    slide mode removes the obstacle-normal component of the remaining
    motion at each contact (at most 3 contacts, then the leftover motion
    is dropped). stop mode discards the whole displacement on any contact.
    Returns (x, y, collided).
    """
    if not slide:
        t, _nx, _ny, hit = first_contact(segments, px, py, dx, dy, radius)
        if hit:
            return px, py, True
        return px + dx, py + dy, False

    pos_x = px
    pos_y = py
    rem_x = dx
    rem_y = dy
    collided = False
    for _ in range(3):
        if rem_x * rem_x + rem_y * rem_y < 1e-24:
            break
        t, nx, ny, hit = first_contact(segments, pos_x, pos_y, rem_x, rem_y, radius)
        if not hit:
            pos_x += rem_x
            pos_y += rem_y
            break
        collided = True
        pos_x += t * rem_x
        pos_y += t * rem_y
        lx = (1.0 - t) * rem_x
        ly = (1.0 - t) * rem_y
        dot = lx * nx + ly * ny
        if dot < 0.0:
            rem_x = lx - dot * nx
            rem_y = ly - dot * ny
        else:
            rem_x = lx
            rem_y = ly
    return pos_x, pos_y, collided

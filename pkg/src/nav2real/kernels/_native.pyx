# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled geometry kernels (hot path of the simulator).

Mirrors kernels._fallback exactly: same candidate enumeration order, same
formulas, same tolerances, so trajectories are identical across backends.
"""

from libc.math cimport sqrt, INFINITY

import numpy as np

DEF SKIN = 1e-9
DEF APPROACH_EPS = 1e-12


def ray_cast(double[:, ::1] segments, double ox, double oy,
             double dx, double dy, double max_range):
    cdef double best = ray_cast_c(segments, ox, oy, dx, dy)
    if best > max_range:
        best = max_range
    return best


cdef double ray_cast_c(double[:, ::1] segments, double ox, double oy,
                       double dx, double dy) nogil:
    cdef Py_ssize_t i, m = segments.shape[0]
    cdef double ax, ay, ux, uy, wx, wy, denom, t, s
    cdef double best = INFINITY
    for i in range(m):
        ax = segments[i, 0]
        ay = segments[i, 1]
        ux = segments[i, 2] - ax
        uy = segments[i, 3] - ay
        wx = ax - ox
        wy = ay - oy
        denom = dx * uy - dy * ux
        if denom == 0.0:
            continue
        t = (wx * uy - wy * ux) / denom
        s = (wx * dy - wy * dx) / denom
        if t >= 0.0 and s >= 0.0 and s <= 1.0 and t < best:
            best = t
    return best


def ray_fan(double[:, ::1] segments, double ox, double oy,
            double[::1] dirx, double[::1] diry, double max_range):
    cdef Py_ssize_t k, n = dirx.shape[0]
    out = np.empty(n)
    cdef double[::1] ov = out
    cdef double best
    with nogil:
        for k in range(n):
            best = ray_cast_c(segments, ox, oy, dirx[k], diry[k])
            if best > max_range:
                best = max_range
            ov[k] = best
    return out


def min_clearance(double[:, ::1] segments, double px, double py):
    cdef Py_ssize_t i, m = segments.shape[0]
    cdef double ax, ay, ux, uy, l2, wx, wy, s, cx, cy, d2
    cdef double best = INFINITY
    if m == 0:
        return INFINITY
    for i in range(m):
        ax = segments[i, 0]
        ay = segments[i, 1]
        ux = segments[i, 2] - ax
        uy = segments[i, 3] - ay
        l2 = ux * ux + uy * uy
        wx = px - ax
        wy = py - ay
        if l2 > 0.0:
            s = (wx * ux + wy * uy) / l2
        else:
            s = 0.0
        if s < 0.0:
            s = 0.0
        elif s > 1.0:
            s = 1.0
        cx = wx - s * ux
        cy = wy - s * uy
        d2 = cx * cx + cy * cy
        if d2 < best:
            best = d2
    return sqrt(best)


cdef bint point_in_ring_c(double[:, ::1] rings, Py_ssize_t lo, Py_ssize_t hi,
                          double px, double py) nogil:
    cdef Py_ssize_t i, j, n = hi - lo
    cdef double xi, yi, xj, yj, xint
    cdef bint inside = False
    for i in range(n):
        j = i + 1
        if j == n:
            j = 0
        xi = rings[lo + i, 0]
        yi = rings[lo + i, 1]
        xj = rings[lo + j, 0]
        yj = rings[lo + j, 1]
        if (yi <= py) != (yj <= py):
            xint = xi + (py - yi) * (xj - xi) / (yj - yi)
            if px < xint:
                inside = not inside
    return inside


def point_in_ring(double[:, ::1] ring, double px, double py):
    return bool(point_in_ring_c(ring, 0, ring.shape[0], px, py))


def navigable(double[:, ::1] segments, double[:, ::1] rings_flat,
              long[::1] ring_starts, double px, double py, double radius):
    cdef Py_ssize_t k, nrings = ring_starts.shape[0] - 1
    if not point_in_ring_c(rings_flat, ring_starts[0], ring_starts[1], px, py):
        return False
    for k in range(1, nrings):
        if point_in_ring_c(rings_flat, ring_starts[k], ring_starts[k + 1], px, py):
            return False
    if radius > 0.0 and min_clearance(segments, px, py) < radius:
        return False
    return True


cdef int first_contact_c(double[:, ::1] segments, double px, double py,
                         double dx, double dy, double radius,
                         double* t_out, double* nx_out, double* ny_out) nogil:
    cdef Py_ssize_t i, m = segments.shape[0]
    cdef double ax, ay, bx, by, ux, uy, l2, wx, wy, s0, ox, oy, dist0
    cdef double n0x, n0y, appr, ulen, enx, eny, f0, fd, sgn, t_face
    cdef double pxt, pyt, s_face, a, b, c, disc, sq, t_c, hxt, hyt
    cdef double ex, ey, end_sign
    cdef double best = INFINITY
    cdef double bnx = 0.0, bny = 0.0
    cdef int hit = 0, col
    for i in range(m):
        ax = segments[i, 0]
        ay = segments[i, 1]
        bx = segments[i, 2]
        by = segments[i, 3]
        ux = bx - ax
        uy = by - ay
        l2 = ux * ux + uy * uy
        wx = px - ax
        wy = py - ay
        if l2 > 0.0:
            s0 = (wx * ux + wy * uy) / l2
        else:
            s0 = 0.0
        if s0 < 0.0:
            s0 = 0.0
        elif s0 > 1.0:
            s0 = 1.0
        ox = wx - s0 * ux
        oy = wy - s0 * uy
        dist0 = sqrt(ox * ox + oy * oy)

        if dist0 <= radius + SKIN:
            # Candidate 0: already touching; only counts if moving inward.
            if dist0 > 1e-15:
                n0x = ox / dist0
                n0y = oy / dist0
                appr = dx * n0x + dy * n0y
                if appr < -APPROACH_EPS and 0.0 < best:
                    best = 0.0
                    bnx = n0x
                    bny = n0y
                    hit = 1
            continue

        # Candidate 1: crossing of an offset edge face.
        if l2 > 0.0:
            ulen = sqrt(l2)
            enx = -uy / ulen
            eny = ux / ulen
            f0 = wx * enx + wy * eny
            fd = dx * enx + dy * eny
            sgn = 1.0 if f0 >= 0.0 else -1.0
            if (f0 if f0 >= 0.0 else -f0) > radius and sgn * fd < 0.0:
                t_face = (sgn * radius - f0) / fd
                if 0.0 <= t_face <= 1.0:
                    pxt = wx + t_face * dx
                    pyt = wy + t_face * dy
                    s_face = (pxt * ux + pyt * uy) / l2
                    if 0.0 <= s_face <= 1.0 and t_face < best:
                        best = t_face
                        bnx = sgn * enx
                        bny = sgn * eny
                        hit = 1

        # Candidates 2, 3: entry through the endpoint circles.
        if radius > 0.0:
            a = dx * dx + dy * dy
            if a > 0.0:
                for col in range(2):
                    if col == 0:
                        ex = wx
                        ey = wy
                        end_sign = 1.0
                    else:
                        ex = px - bx
                        ey = py - by
                        end_sign = -1.0
                    b = 2.0 * (ex * dx + ey * dy)
                    c = ex * ex + ey * ey - radius * radius
                    disc = b * b - 4.0 * a * c
                    if disc < 0.0:
                        continue
                    sq = sqrt(disc)
                    t_c = (-b - sq) / (2.0 * a)
                    if t_c < 0.0 or t_c > 1.0:
                        continue
                    hxt = ex + t_c * dx
                    hyt = ey + t_c * dy
                    if end_sign * (hxt * ux + hyt * uy) <= 0.0 and t_c < best:
                        best = t_c
                        bnx = hxt / radius
                        bny = hyt / radius
                        hit = 1
    if hit:
        t_out[0] = best
        nx_out[0] = bnx
        ny_out[0] = bny
    else:
        t_out[0] = 1.0
        nx_out[0] = 0.0
        ny_out[0] = 0.0
    return hit


def first_contact(double[:, ::1] segments, double px, double py,
                  double dx, double dy, double radius):
    cdef double t = 1.0, nx = 0.0, ny = 0.0
    cdef int hit = first_contact_c(segments, px, py, dx, dy, radius, &t, &nx, &ny)
    return t, nx, ny, hit


def resolve_move(double[:, ::1] segments, double px, double py,
                 double dx, double dy, double radius, bint slide):
    cdef double pos_x = px, pos_y = py, rem_x = dx, rem_y = dy
    cdef double t = 1.0, nx = 0.0, ny = 0.0, lx, ly, dot
    cdef int hit
    cdef bint collided = False
    cdef int it

    if not slide:
        hit = first_contact_c(segments, px, py, dx, dy, radius, &t, &nx, &ny)
        if hit:
            return px, py, True
        return px + dx, py + dy, False

    for it in range(3):
        if rem_x * rem_x + rem_y * rem_y < 1e-24:
            break
        hit = first_contact_c(segments, pos_x, pos_y, rem_x, rem_y, radius,
                              &t, &nx, &ny)
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

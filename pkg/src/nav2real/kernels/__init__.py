"""Geometry kernel selection: compiled extension if available, numpy fallback
otherwise. Both expose the same functions with identical semantics; see
benchmarks/bench_kernels.py for a speed comparison.
"""

from nav2real.kernels import _fallback

try:
    from nav2real.kernels import _native as _impl

    HAVE_NATIVE = True
except ImportError:
    _impl = _fallback
    HAVE_NATIVE = False

ray_cast = _impl.ray_cast
ray_fan = _impl.ray_fan
min_clearance = _impl.min_clearance
point_in_ring = _impl.point_in_ring
navigable = _impl.navigable
first_contact = _impl.first_contact
resolve_move = _impl.resolve_move

__all__ = [
    "HAVE_NATIVE",
    "ray_cast",
    "ray_fan",
    "min_clearance",
    "point_in_ring",
    "navigable",
    "first_contact",
    "resolve_move",
]

"""Planar geometry helpers shared by the rasteriser and the simulator."""

from __future__ import annotations

import math

import numpy as np


def wrap_angle(theta: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    w = (theta + math.pi) % (2.0 * math.pi) - math.pi
    if w == -math.pi:
        w = math.pi
    return w


def rect_corners(x: float, y: float, heading: float,
                 length: float, width: float) -> np.ndarray:
    """Corners of an oriented rectangle centred at (x, y), CCW order, shape (4, 2)."""
    hl, hw = length / 2.0, width / 2.0
    c, s = math.cos(heading), math.sin(heading)
    local = np.array([[hl, hw], [-hl, hw], [-hl, -hw], [hl, -hw]])
    rot = np.array([[c, -s], [s, c]])
    return local @ rot.T + np.array([x, y])


def points_in_rect(xs: np.ndarray, ys: np.ndarray, x: float, y: float,
                   heading: float, length: float, width: float) -> np.ndarray:
    """Boolean mask of points whose centre lies inside the oriented rectangle."""
    c, s = math.cos(heading), math.sin(heading)
    dx = xs - x
    dy = ys - y
    lon = dx * c + dy * s
    lat = -dx * s + dy * c
    return (np.abs(lon) <= length / 2.0) & (np.abs(lat) <= width / 2.0)


def points_in_polygon(xs: np.ndarray, ys: np.ndarray, polygon) -> np.ndarray:
    """Even-odd (ray casting) point-in-polygon test, vectorised over points."""
    poly = np.asarray(polygon, dtype=float)
    inside = np.zeros(xs.shape, dtype=bool)
    n = len(poly)
    for k in range(n):
        x1, y1 = poly[k]
        x2, y2 = poly[(k + 1) % n]
        crosses = (y1 > ys) != (y2 > ys)
        with np.errstate(divide="ignore", invalid="ignore"):
            x_at = (x2 - x1) * (ys - y1) / (y2 - y1) + x1
        inside ^= crosses & (xs < x_at)
    return inside


def _project(corners: np.ndarray, axis: np.ndarray) -> tuple[float, float]:
    d = corners @ axis
    return float(d.min()), float(d.max())


def rects_overlap(corners_a: np.ndarray, corners_b: np.ndarray) -> bool:
    """Separating-axis test between two oriented rectangles given as corner arrays."""
    for corners in (corners_a, corners_b):
        for k in range(2):  # two unique edge normals per rectangle
            edge = corners[k + 1] - corners[k]
            axis = np.array([-edge[1], edge[0]])
            a_lo, a_hi = _project(corners_a, axis)
            b_lo, b_hi = _project(corners_b, axis)
            if a_hi < b_lo or b_hi < a_lo:
                return False
    return True


def point_to_polyline_distance(px: float, py: float, pts: np.ndarray) -> float:
    """Shortest distance from a point to a polyline given as an (n, 2) array."""
    if len(pts) == 1:
        return float(math.hypot(px - pts[0, 0], py - pts[0, 1]))
    a = pts[:-1]
    b = pts[1:]
    ab = b - a
    ap = np.array([px, py]) - a
    denom = np.einsum("ij,ij->i", ab, ab)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(denom > 0, np.einsum("ij,ij->i", ap, ab) / denom, 0.0)
    t = np.clip(t, 0.0, 1.0)
    closest = a + t[:, None] * ab
    d = np.hypot(px - closest[:, 0], py - closest[:, 1])
    return float(d.min())

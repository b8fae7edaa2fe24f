"""Driver's subjective risk field.

The field is a 2D Gaussian ridge laid along the path the vehicle would
follow at its current steering angle: a circular arc of radius L/tan(delta),
degenerating to a straight ray below a small steering threshold.  The ridge
height falls off parabolically toward the look-ahead horizon and the
cross-section widens with travelled distance, asymmetrically between the
inner and outer side of the turn.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

# Steering magnitudes below this are treated as driving straight; the arc
# centre computation loses precision long before the tangent blows up.
STRAIGHT_DELTA = 1e-4

# Lateral support cut-off in units of the local cross-section width.
LATERAL_SIGMA_CUTOFF = 3.0

DEFAULT_RESOLUTION = 0.5


class Straight:
    """Marker returned by turn_radius when the vehicle is not turning."""

    def __repr__(self):
        return "Straight"

    def __eq__(self, other):
        return isinstance(other, Straight)

    def __hash__(self):
        return hash(Straight)


STRAIGHT = Straight()


@dataclass(frozen=True)
class VehicleState:
    """Pose and actuation of one vehicle at one step."""

    x: float
    y: float
    heading: float
    v: float
    delta: float
    wheelbase: float
    length: float
    width: float

    def __post_init__(self):
        if self.v < 0:
            raise ValueError("speed must be non-negative")
        if not abs(self.delta) < math.pi / 2:
            raise ValueError("steering angle must satisfy |delta| < pi/2")
        if min(self.wheelbase, self.length, self.width) <= 0:
            raise ValueError("vehicle dimensions must be positive")


@dataclass(frozen=True)
class DrfParams:
    """The seven field parameters defining a driving style.

    p      parabola steepness of the ridge height [1/m^2]
    d_s    safety distance added to the look-ahead [m]
    m      widening slope of the cross-section per metre travelled
    c      cross-section width at the vehicle position [m]
    t_la   look-ahead time [s]
    k1/k2  extra widening gain of the inner/outer boundary per rad of steering
    """

    p: float = 0.06
    d_s: float = 12.0
    m: float = 0.001
    c: float = 0.5
    t_la: float = 4.0
    k1: float = 0.0
    k2: float = 1.12

    def __post_init__(self):
        if self.p <= 0:
            raise ValueError("p must be positive")
        if self.d_s < 0:
            raise ValueError("d_s must be non-negative")
        if self.m < 0:
            raise ValueError("m must be non-negative")
        if self.c <= 0:
            raise ValueError("c must be positive")
        if self.t_la <= 0:
            raise ValueError("t_la must be positive")
        if self.k1 < 0 or self.k2 < 0:
            raise ValueError("k1 and k2 must be non-negative")


@dataclass(frozen=True)
class Grid:
    """Dense scalar raster on the global cell lattice.

    Cell (ix, iy) is centred at ((gx0 + ix + 0.5) * resolution,
    (gy0 + iy + 0.5) * resolution); anchoring every grid to the same lattice
    keeps independently built rasters co-registered.  ``values`` has shape
    (height, width), indexed [iy, ix].
    """

    gx0: int
    gy0: int
    resolution: float
    width: int
    height: int
    values: np.ndarray

    def __post_init__(self):
        if self.resolution <= 0:
            raise ValueError("resolution must be positive")
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.height, self.width):
            raise ValueError(f"values shape {v.shape} != (height, width)=({self.height}, {self.width})")
        object.__setattr__(self, "values", v)

    @property
    def origin(self) -> tuple[float, float]:
        """Centre of cell (0, 0)."""
        return ((self.gx0 + 0.5) * self.resolution, (self.gy0 + 0.5) * self.resolution)

    def cell_centers(self) -> tuple[np.ndarray, np.ndarray]:
        """Flat arrays of x and y centre coordinates, row-major over [iy, ix]."""
        ix = np.arange(self.width)
        iy = np.arange(self.height)
        xs = (self.gx0 + ix + 0.5) * self.resolution
        ys = (self.gy0 + iy + 0.5) * self.resolution
        gx, gy = np.meshgrid(xs, ys)
        return gx.ravel(), gy.ravel()

    def same_geometry(self, other: "Grid") -> bool:
        return (
            self.gx0 == other.gx0
            and self.gy0 == other.gy0
            and self.resolution == other.resolution
            and self.width == other.width
            and self.height == other.height
        )


@dataclass(frozen=True)
class GridSpec:
    """Geometry of a grid before it holds any values."""

    gx0: int
    gy0: int
    resolution: float
    width: int
    height: int

    @staticmethod
    def from_bounds(xmin: float, ymin: float, xmax: float, ymax: float,
                    resolution: float = DEFAULT_RESOLUTION) -> "GridSpec":
        """Smallest lattice-aligned grid whose cell centres cover the box."""
        gx0 = math.floor(xmin / resolution - 0.5)
        gy0 = math.floor(ymin / resolution - 0.5)
        gx1 = math.ceil(xmax / resolution - 0.5)
        gy1 = math.ceil(ymax / resolution - 0.5)
        return GridSpec(gx0=gx0, gy0=gy0, resolution=resolution,
                        width=gx1 - gx0 + 1, height=gy1 - gy0 + 1)

    def make_grid(self, values: np.ndarray) -> Grid:
        return Grid(gx0=self.gx0, gy0=self.gy0, resolution=self.resolution,
                    width=self.width, height=self.height, values=values)

    def zeros(self) -> Grid:
        return self.make_grid(np.zeros((self.height, self.width)))

    def cell_centers(self) -> tuple[np.ndarray, np.ndarray]:
        return self.zeros().cell_centers()

    def contains(self, x: float, y: float) -> bool:
        ox = (self.gx0 + 0.5) * self.resolution
        oy = (self.gy0 + 0.5) * self.resolution
        half = self.resolution / 2
        return (ox - half <= x <= ox + (self.width - 0.5) * self.resolution
                and oy - half <= y <= oy + (self.height - 0.5) * self.resolution)


@dataclass(frozen=True)
class RiskField:
    """Gaussian ridge values on a grid plus the predicted path that shaped them."""

    grid: Grid
    path_xy: np.ndarray      # (n_samples, 2) points along the predicted path
    path_s: np.ndarray       # arc length of each sample
    d_la: float
    truncated: bool = False  # grid was too small to contain the whole path


def turn_radius(state: VehicleState):
    """Signed trajectory radius L/tan(delta); positive turns left.

    Returns the STRAIGHT marker below the steering threshold instead of the
    near-singular radius.
    """
    if abs(state.delta) < STRAIGHT_DELTA:
        return STRAIGHT
    return state.wheelbase / math.tan(state.delta)


def lookahead_distance(state: VehicleState, params: DrfParams) -> float:
    """Horizon of the field: v * t_la + d_s."""
    return state.v * params.t_la + params.d_s


def sigma_pair(params: DrfParams, delta: float, s) -> tuple[np.ndarray, np.ndarray]:
    """Inner and outer cross-section widths at travelled distance(s) ``s``."""
    ad = abs(delta)
    s1 = (params.m + params.k1 * ad) * s + params.c
    s2 = (params.m + params.k2 * ad) * s + params.c
    return s1, s2


def _path_points(state: VehicleState, d_la: float, step: float):
    """Sample the predicted arc/ray every ``step`` metres for s in [0, d_la]."""
    n = int(math.floor(d_la / step)) + 1
    s = np.arange(n) * step
    radius = turn_radius(state)
    if radius is STRAIGHT:
        xs = state.x + s * math.cos(state.heading)
        ys = state.y + s * math.sin(state.heading)
        return np.column_stack([xs, ys]), s, None
    r = radius
    cx = state.x - r * math.sin(state.heading)
    cy = state.y + r * math.cos(state.heading)
    phi0 = math.atan2(state.y - cy, state.x - cx)
    phi = phi0 + s / r
    xs = cx + abs(r) * np.cos(phi)
    ys = cy + abs(r) * np.sin(phi)
    return np.column_stack([xs, ys]), s, (r, cx, cy, phi0)


def field_values(state: VehicleState, params: DrfParams,
                 xs: np.ndarray, ys: np.ndarray,
                 resolution: float = DEFAULT_RESOLUTION,
                 squared_exponent: bool = True) -> np.ndarray:
    """Gaussian ridge value at each query point.

    Ridge height is a(s) = p (s - d_la)^2 evaluated at the nearest path
    sample (spaced at ``resolution``); the cross-section uses the point's
    own lateral offset from the path centreline, with the inner-side width
    toward the turn centre and the outer-side width away from it.  Points
    behind the start, beyond the horizon, or farther than three widths
    laterally get 0.

    ``squared_exponent=False`` switches to a linear lateral offset in the
    exponent (no genuine Gaussian cross-section); kept only for comparison.
    """
    d_la = lookahead_distance(state, params)
    step = _sample_step(d_la, resolution)
    n_samp = int(math.floor(d_la / step))  # highest sample index
    radius = turn_radius(state)

    if radius is STRAIGHT:
        dx = xs - state.x
        dy = ys - state.y
        ca, sa = math.cos(state.heading), math.sin(state.heading)
        lon = dx * ca + dy * sa
        lat = -dx * sa + dy * ca
        in_range = (lon >= 0.0) & (lon <= d_la)
        idx = np.clip(np.rint(lon / step), 0, n_samp)
        s_near = idx * step
        sig1, _ = sigma_pair(params, state.delta, s_near)
        sig = sig1  # both sides use the inner width when not turning
        a = params.p * (s_near - d_la) ** 2
        offset = lat * lat if squared_exponent else lat
        g = a * np.exp(-offset / (2.0 * sig * sig))
        g[~in_range] = 0.0
        g[np.abs(lat) > LATERAL_SIGMA_CUTOFF * sig] = 0.0
        return g

    r = radius
    cx = state.x - r * math.sin(state.heading)
    cy = state.y + r * math.cos(state.heading)
    phi0 = math.atan2(state.y - cy, state.x - cx)
    dxc = xs - cx
    dyc = ys - cy
    dist_c = np.sqrt(dxc * dxc + dyc * dyc)
    phi = np.arctan2(dyc, dxc)
    # angular progress along the travel direction, wrapped to [0, 2*pi)
    prog = np.mod((phi - phi0) * math.copysign(1.0, r), 2.0 * math.pi)
    s_exact = prog * abs(r)
    in_range = s_exact <= d_la
    idx = np.clip(np.rint(s_exact / step), 0, n_samp)
    s_near = idx * step
    sig1, sig2 = sigma_pair(params, state.delta, s_near)
    lat = dist_c - abs(r)          # positive on the outer side of the turn
    sig = np.where(lat < 0.0, sig1, sig2)
    a = params.p * (s_near - d_la) ** 2
    offset = lat * lat if squared_exponent else lat
    g = a * np.exp(-offset / (2.0 * sig * sig))
    g[~in_range] = 0.0
    g[np.abs(lat) > LATERAL_SIGMA_CUTOFF * sig] = 0.0
    return g


def _sample_step(d_la: float, resolution: float = DEFAULT_RESOLUTION) -> float:
    # keep at least two samples even for tiny horizons
    return min(resolution, d_la / 2.0) if d_la > 0 else resolution


def support_spec(state: VehicleState, params: DrfParams,
                 resolution: float = DEFAULT_RESOLUTION) -> GridSpec:
    """Tight lattice-aligned grid covering the path corridor plus 3 sigma."""
    d_la = lookahead_distance(state, params)
    pts, _, _ = _path_points(state, d_la, _sample_step(d_la, resolution))
    _, sig2 = sigma_pair(params, state.delta, d_la)
    margin = LATERAL_SIGMA_CUTOFF * float(sig2) + resolution
    return GridSpec.from_bounds(
        float(pts[:, 0].min()) - margin, float(pts[:, 1].min()) - margin,
        float(pts[:, 0].max()) + margin, float(pts[:, 1].max()) + margin,
        resolution,
    )


def default_spec(state: VehicleState, params: DrfParams,
                 resolution: float = DEFAULT_RESOLUTION) -> GridSpec:
    """Square grid centred on the vehicle, inflated by the horizon plus 3 sigma."""
    d_la = lookahead_distance(state, params)
    _, sig2 = sigma_pair(params, state.delta, d_la)
    pad = d_la + LATERAL_SIGMA_CUTOFF * float(sig2) + resolution
    return GridSpec.from_bounds(state.x - pad, state.y - pad,
                                state.x + pad, state.y + pad, resolution)


def build_field(state: VehicleState, params: DrfParams,
                spec: GridSpec | None = None,
                squared_exponent: bool = True) -> RiskField:
    """Rasterise the risk field on ``spec`` (default: tight corridor grid)."""
    if spec is None:
        spec = support_spec(state, params)
    if not spec.contains(state.x, state.y):
        raise ValueError("grid does not cover the vehicle position")
    d_la = lookahead_distance(state, params)
    pts, s, _ = _path_points(state, d_la, _sample_step(d_la, spec.resolution))
    xs, ys = spec.cell_centers()
    g = field_values(state, params, xs, ys, resolution=spec.resolution,
                     squared_exponent=squared_exponent)
    grid = spec.make_grid(g.reshape(spec.height, spec.width))
    truncated = not all(spec.contains(float(px), float(py)) for px, py in pts)
    return RiskField(grid=grid, path_xy=pts, path_s=s, d_la=d_la, truncated=truncated)


def dump_field_csv(rf: RiskField, path) -> None:
    """Write (x, y, G) rows for plotting."""
    xs, ys = rf.grid.cell_centers()
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["x", "y", "g"])
        for x, y, g in zip(xs, ys, rf.grid.values.ravel()):
            writer.writerow([repr(float(x)), repr(float(y)), repr(float(g))])

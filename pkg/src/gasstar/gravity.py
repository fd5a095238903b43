"""Radial Newtonian potential theory for spherically symmetric densities.

The Poisson convention is Delta V = 4*pi*rho with V -> 0 at infinity, so
V(r) = -4*pi * [ (1/r) * int_0^r s^2 rho ds  +  int_r^inf s rho ds ].
Densities live on finite grids; everything outside the last node is treated
analytically through the total mass (V = -M/r, V' = M/r^2), which is exact
for compactly supported sources.
"""

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import DomainError
from .grids import FOUR_PI, GridDensity

__all__ = [
    "RadialField", "potential_of", "field_of", "enclosed_mass",
    "field_norm_sq", "potential_energy",
]


class RadialField:
    """Potential or field values on a grid, with the analytic exterior tail."""

    def __init__(self, grid, values, mass, kind):
        if kind not in ("potential", "field"):
            raise DomainError("kind must be 'potential' or 'field'")
        self.grid = grid
        self.values = np.asarray(values, dtype=float)
        self.mass = float(mass)
        self.kind = kind
        self._interp = None

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        if self._interp is None:
            self._interp = PchipInterpolator(self.grid.nodes, self.values)
        inside = self._interp(np.clip(r, self.grid.nodes[0], self.grid.r_max))
        if self.kind == "potential":
            outside = -self.mass / np.where(r > 0, r, np.inf)
        else:
            outside = self.mass / np.where(r > 0, r, np.inf) ** 2
        out = np.where(r <= self.grid.r_max, inside, outside)
        return float(out) if out.ndim == 0 else out


def _require_density(rho):
    if not isinstance(rho, GridDensity):
        raise DomainError("expected a GridDensity")


def enclosed_mass(rho):
    """Mass function m(r) on the grid and the total mass M."""
    _require_density(rho)
    m = FOUR_PI * rho.grid.cumulative(rho.grid.nodes ** 2 * rho.values)
    return m, float(m[-1])


def field_of(rho):
    """Radial field V'(r) = m(r)/r^2; zero at the center."""
    _require_density(rho)
    m, total = enclosed_mass(rho)
    r = rho.grid.nodes
    with np.errstate(divide="ignore", invalid="ignore"):
        vp = np.where(r > 0.0, m / r ** 2, 0.0)
    return RadialField(rho.grid, vp, total, "field")


def potential_of(rho):
    """Induced potential V(r) <= 0, nondecreasing, -M/r outside the source."""
    _require_density(rho)
    grid = rho.grid
    r = grid.nodes
    inner = grid.cumulative(r ** 2 * rho.values)
    outer = grid.cumulative(r * rho.values)
    tail = outer[-1] - outer
    with np.errstate(divide="ignore", invalid="ignore"):
        over_r = np.where(r > 0.0, inner / r, 0.0)
    v = -FOUR_PI * (over_r + tail)
    return RadialField(grid, v, FOUR_PI * inner[-1], "potential")


def field_norm_sq(rho_a, rho_b, allow_resample=True):
    """Squared L2 distance of the induced fields, || grad V_a - grad V_b ||^2.

    Includes the analytic tail beyond the grid, which vanishes when the two
    densities carry the same mass.
    """
    _require_density(rho_a)
    _require_density(rho_b)
    if not rho_a.grid.same_nodes(rho_b.grid):
        if not allow_resample:
            raise DomainError("densities live on different grids and resampling is disabled")
        rho_b = rho_b.resampled(rho_a.grid)
    fa = field_of(rho_a)
    fb = field_of(rho_b)
    diff = fa.values - fb.values
    tail = FOUR_PI * (fa.mass - fb.mass) ** 2 / rho_a.grid.r_max
    return rho_a.grid.volume_integrate(diff ** 2) + tail


# -- potential energy, three equivalent evaluation forms ---------------------

def _one_sided_segments(x, f):
    """Per-interval integrals, each from the quadratic through three nodes."""
    n = len(x) - 1
    seg = np.zeros(n)
    if n == 1:
        seg[0] = 0.5 * (x[1] - x[0]) * (f[0] + f[1])
        return seg
    h0 = x[1] - x[0]
    h1 = x[2] - x[1]
    seg[0] = (h0 * (2.0 * h0 + 3.0 * h1) / (6.0 * (h0 + h1)) * f[0]
              + h0 * (h0 + 3.0 * h1) / (6.0 * h1) * f[1]
              - h0 ** 3 / (6.0 * h1 * (h0 + h1)) * f[2])
    a = x[1:-1] - x[:-2]
    b = x[2:] - x[1:-1]
    seg[1:] = (b * (2.0 * b + 3.0 * a) / (6.0 * (a + b)) * f[2:]
               + b * (b + 3.0 * a) / (6.0 * a) * f[1:-1]
               - b ** 3 / (6.0 * a * (a + b)) * f[:-2])
    return seg


def _prefix_integral(grid, f):
    out = np.zeros_like(grid.nodes)
    edges = (0,) + grid.breaks + (len(grid.nodes) - 1,)
    offset = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        seg = _one_sided_segments(grid.nodes[lo : hi + 1], f[lo : hi + 1])
        out[lo + 1 : hi + 1] = offset + np.cumsum(seg)
        offset = out[hi]
    out[0] = 0.0
    return out


def _suffix_integral(grid, f):
    rev_nodes = -grid.nodes[::-1]
    n = len(grid.nodes)
    rev_breaks = tuple(sorted(n - 1 - b for b in grid.breaks))

    class _Rev:
        nodes = rev_nodes
        breaks = rev_breaks

    return _prefix_integral(_Rev, f[::-1])[::-1]


def potential_energy(rho, form="field"):
    """E_pot(rho) by one of the three equivalent expressions.

    form='pair'      : -(1/2) double integral of rho rho / |x-y|
    form='potential' : (1/2) int rho V_rho
    form='field'     : -(1/8 pi) int |grad V_rho|^2   (default; best conditioned)
    """
    _require_density(rho)
    grid = rho.grid
    r = grid.nodes
    if form == "field":
        fld = field_of(rho)
        tail = FOUR_PI * fld.mass ** 2 / grid.r_max
        return -(grid.volume_integrate(fld.values ** 2) + tail) / (8.0 * np.pi)
    if form == "potential":
        v = potential_of(rho)
        return 0.5 * grid.volume_integrate(rho.values * v.values)
    if form == "pair":
        inner = _prefix_integral(grid, r ** 2 * rho.values)
        suffix = _suffix_integral(grid, r * rho.values)
        with np.errstate(divide="ignore", invalid="ignore"):
            over_r = np.where(r > 0.0, inner / r, 0.0)
        return -0.5 * FOUR_PI ** 2 * float(
            np.dot(grid.weights, rho.values * r ** 2 * (over_r + suffix))
        )
    raise DomainError(f"unknown potential-energy form {form!r}")

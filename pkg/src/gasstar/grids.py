"""Radial grids, quadrature rules, and grid-sampled densities.

All volume integrals use the spherically symmetric measure 4*pi*r^2 dr.
Grids may carry break indices marking nodes where an integrand is allowed
to lose smoothness (a star surface, a ball edge); quadrature weights are
then assembled per smooth segment so the composite rule never straddles
a kink.
"""

import numpy as np
from scipy.integrate import cumulative_simpson
from scipy.interpolate import PchipInterpolator

from .errors import DomainError

FOUR_PI = 4.0 * np.pi


def _simpson_segment_weights(x):
    """Composite Simpson weights for one smooth segment of nodes.

    Handles nonuniform spacing; an odd final interval is integrated with
    the quadratic through the last three nodes.
    """
    m = len(x) - 1
    w = np.zeros_like(x)
    if m == 0:
        return w
    if m == 1:
        h = x[1] - x[0]
        w[0] += 0.5 * h
        w[1] += 0.5 * h
        return w
    npairs = m // 2
    for p in range(npairs):
        i = 2 * p
        h0 = x[i + 1] - x[i]
        h1 = x[i + 2] - x[i + 1]
        s = h0 + h1
        w[i] += s * (2.0 * h0 - h1) / (6.0 * h0)
        w[i + 1] += s ** 3 / (6.0 * h0 * h1)
        w[i + 2] += s * (2.0 * h1 - h0) / (6.0 * h1)
    if m % 2 == 1:
        h0 = x[m - 1] - x[m - 2]
        h1 = x[m] - x[m - 1]
        w[m] += (2.0 * h1 * h1 + 3.0 * h0 * h1) / (6.0 * (h0 + h1))
        w[m - 1] += (h1 * h1 + 3.0 * h0 * h1) / (6.0 * h0)
        w[m - 2] -= h1 ** 3 / (6.0 * h0 * (h0 + h1))
    return w


class RadialGrid:
    """Strictly increasing radial nodes with per-segment Simpson weights.

    Parameters
    ----------
    nodes : array_like
        Radii, nodes[0] >= 0, strictly increasing.
    breaks : iterable of int, optional
        Interior node indices at which integrands may have kinks.
    """

    def __init__(self, nodes, breaks=()):
        nodes = np.asarray(nodes, dtype=float)
        if nodes.ndim != 1 or len(nodes) < 2:
            raise DomainError("grid needs at least two nodes")
        if nodes[0] < 0.0 or np.any(np.diff(nodes) <= 0.0):
            raise DomainError("grid nodes must be nonnegative and strictly increasing")
        self.nodes = nodes
        self.breaks = tuple(sorted(int(b) for b in breaks))
        for b in self.breaks:
            if not 0 < b < len(nodes) - 1:
                raise DomainError("break index must be interior to the grid")
        self._weights = None

    @classmethod
    def uniform(cls, r_max, n, breaks=()):
        return cls(np.linspace(0.0, float(r_max), int(n)), breaks=breaks)

    def __len__(self):
        return len(self.nodes)

    @property
    def r_max(self):
        return float(self.nodes[-1])

    def same_nodes(self, other):
        return len(self.nodes) == len(other.nodes) and np.array_equal(
            self.nodes, other.nodes
        )

    @property
    def weights(self):
        """Quadrature weights for integrals in dr."""
        if self._weights is None:
            w = np.zeros_like(self.nodes)
            edges = (0,) + self.breaks + (len(self.nodes) - 1,)
            for a, b in zip(edges[:-1], edges[1:]):
                w[a : b + 1] += _simpson_segment_weights(self.nodes[a : b + 1])
            self._weights = w
        return self._weights

    @property
    def volume_weights(self):
        """Weights for integrals in 4*pi*r^2 dr."""
        return self.weights * FOUR_PI * self.nodes ** 2

    def integrate(self, f):
        return float(np.dot(self.weights, f))

    def volume_integrate(self, f):
        return float(np.dot(self.volume_weights, f))

    def cumulative(self, f):
        """Running integral of f in dr from the first node to every node."""
        out = np.zeros_like(self.nodes)
        edges = (0,) + self.breaks + (len(self.nodes) - 1,)
        offset = 0.0
        for a, b in zip(edges[:-1], edges[1:]):
            seg = cumulative_simpson(f[a : b + 1], x=self.nodes[a : b + 1], initial=0.0)
            out[a : b + 1] = offset + seg
            offset = out[b]
        return out


class GridDensity:
    """Nonnegative density sampled on a radial grid; a variational trial state."""

    def __init__(self, grid, values):
        values = np.asarray(values, dtype=float)
        if values.shape != grid.nodes.shape:
            raise DomainError("density values must match the grid shape")
        if not np.all(np.isfinite(values)):
            raise DomainError("density values must be finite")
        if np.any(values < 0.0):
            raise DomainError("density values must be nonnegative")
        self.grid = grid
        self.values = values
        self._mass = None

    @property
    def mass(self):
        if self._mass is None:
            self._mass = self.grid.volume_integrate(self.values)
        return self._mass

    def renormalized(self, target_mass):
        """Scale to the requested total mass (multiplicative, keeps sign)."""
        m = self.mass
        if m <= 0.0:
            raise DomainError("cannot renormalize a zero-mass density")
        return GridDensity(self.grid, self.values * (target_mass / m))

    def resampled(self, new_grid):
        """Monotone cubic resample onto another grid (preserves nonnegativity)."""
        interp = PchipInterpolator(self.grid.nodes, self.values, extrapolate=False)
        vals = interp(np.clip(new_grid.nodes, self.grid.nodes[0], self.grid.nodes[-1]))
        vals = np.where(new_grid.nodes > self.grid.nodes[-1], 0.0, vals)
        return GridDensity(new_grid, np.maximum(vals, 0.0))

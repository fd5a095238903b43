"""Static self-gravitating stars via the semilinear Poisson shooting problem.

With z(r) := E0 - V0(r), a steady state obeys

    z'' + (2/r) z' = -4*pi * g(z_+),   z(0) = kappa,  z'(0) = 0,

where g is the inverse of Phi'.  Integration proceeds outward until z first
crosses zero at the support radius R; the total mass is M = -R^2 z'(R) and
the cutoff energy E0 = -M/R, which matches the exterior vacuum potential
-M/r.  For polytropes this is the Lane-Emden problem and all regular
solutions are related by a one-parameter scaling.
"""

import csv
import json
import os
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from . import eos as eos_mod
from . import gravity
from .errors import (DomainError, InfiniteRadiusError, MassUnreachableError,
                     NumericalError)
from .grids import FOUR_PI, GridDensity, RadialGrid

R_CAP_FACTOR = 1e4  # beyond this multiple of the initial radius guess: non-compact


class RadialProfile:
    """A steady star: density, potential, cutoff energy, and support radius."""

    def __init__(self, grid, rho0, V0, E0, R_support, M, kappa, eos, support_index):
        self.grid = grid
        self.rho0 = np.asarray(rho0, dtype=float)
        self.V0 = np.asarray(V0, dtype=float)
        self.E0 = float(E0)
        self.R_support = float(R_support)
        self.M = float(M)
        self.kappa = float(kappa)
        self.eos = eos
        self.support_index = int(support_index)

    @property
    def z(self):
        """z = E0 - V0, clipped at zero outside the support."""
        return np.maximum(self.E0 - self.V0, 0.0)

    @property
    def support_mask(self):
        return self.rho0 > 0.0

    def density(self):
        return GridDensity(self.grid, self.rho0)

    def save(self, directory, stem="profile"):
        """Write <stem>.csv (r, rho0, V0, Vprime, m) and <stem>.json header."""
        os.makedirs(directory, exist_ok=True)
        dens = self.density()
        m, _ = gravity.enclosed_mass(dens)
        vprime = gravity.field_of(dens).values
        csv_path = os.path.join(directory, stem + ".csv")
        with open(csv_path, "w", newline="") as fh:
            fh.write("# columns: r, rho0, V0, Vprime, m (dimensionless units, G=1)\n")
            writer = csv.writer(fh)
            writer.writerow(["r", "rho0", "V0", "Vprime", "m"])
            for row in zip(self.grid.nodes, self.rho0, self.V0, vprime, m):
                writer.writerow([repr(float(x)) for x in row])
        header = {
            "E0": self.E0,
            "R_support": self.R_support,
            "M": self.M,
            "kappa": self.kappa,
            "eos": self.eos.describe(),
            "support_index": self.support_index,
            "n_nodes": len(self.grid),
        }
        json_path = os.path.join(directory, stem + ".json")
        with open(json_path, "w") as fh:
            json.dump(header, fh, indent=2, sort_keys=True)
            fh.write("\n")
        return csv_path, json_path


def _series_start(g_kappa, kappa):
    """Radius guess and series initial data removing the 2/r singularity."""
    r_guess = np.sqrt(3.0 * kappa / (2.0 * np.pi * g_kappa))
    h0 = 1e-6 * r_guess
    z0 = kappa - (2.0 * np.pi / 3.0) * g_kappa * h0 ** 2
    zp0 = -(FOUR_PI / 3.0) * g_kappa * h0
    return r_guess, h0, z0, zp0


def _integrate(eos, kappa, rtol, dense):
    if kappa <= 0.0:
        raise DomainError("central value kappa must be positive")
    g = eos.phi_prime_inv
    g_kappa = float(g(kappa))
    if g_kappa <= 0.0:
        raise DomainError("phi_prime_inv(kappa) must be positive")
    r_guess, h0, z0, zp0 = _series_start(g_kappa, kappa)

    def rhs(r, y):
        z, zp = y
        return (zp, -FOUR_PI * float(g(z if z > 0.0 else 0.0)) - 2.0 * zp / r)

    def surface(r, y):
        return y[0]

    surface.terminal = True
    surface.direction = -1

    sol = solve_ivp(
        rhs, (h0, R_CAP_FACTOR * r_guess), [z0, zp0],
        method="RK45", rtol=rtol, atol=[1e-14 * kappa, 1e-14 * kappa / r_guess],
        events=surface, dense_output=dense,
    )
    if sol.status != 1:
        raise InfiniteRadiusError(
            f"z never crossed zero before r = {R_CAP_FACTOR:g} "
            f"x the radius guess {r_guess:g}: the equation of state does not "
            "produce a compactly supported star at this kappa"
        )
    R = float(sol.t_events[0][0])
    zpR = float(sol.y_events[0][0, 1])
    return sol, R, zpR, h0


def _radius_mass(eos, kappa, rtol=1e-10):
    """Light outward march: support radius, mass, cutoff energy only."""
    _, R, zpR, _ = _integrate(eos, kappa, rtol=rtol, dense=False)
    M = -R ** 2 * zpR
    return R, M, -M / R


def shoot(eos, kappa, n_interior=2048, r_max_factor=2.0, n_exterior=None,
          rtol=1e-12):
    """Integrate outward from central value kappa and build the full profile.

    Returns a RadialProfile on a grid with ``n_interior`` nodes spanning
    [0, R] (R a node, marked as a quadrature break) plus exterior nodes out
    to ``r_max_factor * R`` where the potential is the vacuum -M/r.
    """
    if n_interior < 16:
        raise DomainError("n_interior must be at least 16")
    if r_max_factor <= 1.0:
        raise DomainError("r_max_factor must exceed 1")
    sol, R, zpR, h0 = _integrate(eos, kappa, rtol=rtol, dense=True)
    M = -R ** 2 * zpR
    E0 = -M / R

    if n_exterior is None:
        n_exterior = max(n_interior // 4, 16)
    r_in = np.linspace(0.0, R, n_interior)
    r_out = np.linspace(R, r_max_factor * R, n_exterior + 1)[1:]
    nodes = np.concatenate([r_in, r_out])
    support_index = n_interior - 1
    grid = RadialGrid(nodes, breaks=(support_index,))

    z = np.zeros_like(nodes)
    z[0] = kappa
    inner = (nodes > 0.0) & (nodes < R)
    zz = sol.sol(np.clip(nodes[inner], h0, R))[0]
    z[inner] = np.maximum(zz, 0.0)

    V0 = np.where(nodes <= R, E0 - z, 0.0)
    with np.errstate(divide="ignore"):
        V0 = np.where(nodes > R, -M / nodes, V0)
    # rho0 from the stored potential so the Euler-Lagrange relation holds
    # node-wise to roundoff
    rho0 = np.asarray(eos.phi_prime_inv(np.maximum(E0 - V0, 0.0)), dtype=float)
    rho0[support_index:] = 0.0
    return RadialProfile(grid, rho0, V0, E0, R, M, kappa, eos, support_index)


def match_mass(eos, M_target, kappa_scan=None, n_interior=2048,
               r_max_factor=2.0, n_exterior=None, rtol=1e-12):
    """Find the central value whose star carries the prescribed mass.

    Polytropes use the exact scaling law M ~ kappa**((3-n)/2); other
    equations of state are bracketed by a geometric scan over kappa and
    refined by root finding.
    """
    if M_target <= 0.0:
        raise DomainError("target mass must be positive")
    if eos.kind == "polytrope":
        n = eos.poly_index
        _, M1, _ = _radius_mass(eos, 1.0)
        kappa = (M_target / M1) ** (2.0 / (3.0 - n))
        prof = shoot(eos, kappa, n_interior=n_interior,
                     r_max_factor=r_max_factor, n_exterior=n_exterior,
                     rtol=rtol)
    else:
        kappa = _scan_for_mass(eos, M_target, kappa_scan)
        prof = shoot(eos, kappa, n_interior=n_interior,
                     r_max_factor=r_max_factor, n_exterior=n_exterior,
                     rtol=rtol)
    if abs(prof.M - M_target) > 1e-8 * M_target:
        raise NumericalError(
            f"mass matching missed the target: got {prof.M}, want {M_target}"
        )
    return prof


def _scan_for_mass(eos, M_target, kappa_scan=None, march_rtol=1e-10):
    if kappa_scan is None:
        kappa_scan = [2.0 ** j for j in range(-20, 21)]
    table = []
    for kap in kappa_scan:
        try:
            _, m, _ = _radius_mass(eos, kap, rtol=march_rtol)
        except InfiniteRadiusError:
            m = np.nan
        table.append((kap, m))
    brackets = []
    for (k0, m0), (k1, m1) in zip(table[:-1], table[1:]):
        if np.isfinite(m0) and np.isfinite(m1):
            if (m0 - M_target) * (m1 - M_target) <= 0.0:
                brackets.append((k0, k1))
    if not brackets:
        lines = ", ".join(f"kappa={k:g}: M={m:g}" for k, m in table)
        raise MassUnreachableError(
            f"mass {M_target} not bracketed by the kappa scan ({lines})",
            scan_table=table,
        )
    k0, k1 = brackets[0]  # smallest bracketing kappa; M(kappa) need not be monotone
    return brentq(lambda k: _radius_mass(eos, k, rtol=march_rtol)[1] - M_target,
                  k0, k1, rtol=1e-12)


def scaling_family(profile, lam):
    """Rescale a polytropic solution: z -> lam * z(lam**((n-1)/2) * r).

    The image satisfies the shooting postconditions without re-integration.
    """
    if profile.eos.kind != "polytrope":
        raise DomainError("the scaling family is defined for polytropes only")
    if lam <= 0.0:
        raise DomainError("scaling parameter must be positive")
    n = profile.eos.poly_index
    mu = lam ** ((n - 1.0) / 2.0)
    nodes = profile.grid.nodes / mu
    grid = RadialGrid(nodes, breaks=profile.grid.breaks)
    R = profile.R_support / mu
    M = lam ** ((3.0 - n) / 2.0) * profile.M
    E0 = -M / R
    z = lam * profile.z
    V0 = np.where(nodes <= R, E0 - z, 0.0)
    with np.errstate(divide="ignore"):
        V0 = np.where(nodes > R, -M / nodes, V0)
    rho0 = np.asarray(profile.eos.phi_prime_inv(np.maximum(E0 - V0, 0.0)))
    rho0[profile.support_index:] = 0.0
    return RadialProfile(grid, rho0, V0, E0, R, M, lam * profile.kappa,
                         profile.eos, profile.support_index)


@dataclass
class ELResidual:
    support: float    # max |Phi'(rho0) + V0 - E0| where rho0 > 0
    exterior: float   # max (E0 - V0)_+ where rho0 = 0


def euler_lagrange_residual(profile):
    """Pointwise residual of the first-order optimality relation."""
    mask = profile.support_mask
    sup = 0.0
    if np.any(mask):
        g = profile.eos.phi_prime(profile.rho0[mask])
        sup = float(np.max(np.abs(g + profile.V0[mask] - profile.E0)))
    ext = 0.0
    if np.any(~mask):
        ext = float(np.max(np.maximum(profile.E0 - profile.V0[~mask], 0.0)))
    return ELResidual(support=sup, exterior=ext)


def static_euler_residual(profile):
    """Max norm of p0' + rho0 V0' over interior support nodes, O(h^2)."""
    ks = profile.support_index
    r = profile.grid.nodes[: ks + 1]
    p = np.asarray(profile.eos.pressure(profile.rho0[: ks + 1]))
    dp = np.gradient(p, r)
    dv = np.gradient(profile.V0[: ks + 1], r)
    resid = dp + profile.rho0[: ks + 1] * dv
    return float(np.max(np.abs(resid[1:-1])))

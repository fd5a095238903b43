"""Barotropic equations of state and their convex energy potential.

An equation of state enters everywhere through two functions of density:
the pressure P(rho) and the convex potential Phi(rho) built from it via
P'(tau) = tau * Phi''(tau).  Polytropes P = c*rho**gamma carry closed forms;
a generalized EOS is specified by its pressure derivative P' and handled by
adaptive quadrature and bracketed root finding.
"""

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.optimize import brentq

from .errors import ConfigurationError, DomainError, NumericalError

_QUAD_KW = dict(epsabs=1e-12, epsrel=1e-11, limit=200)


def _check_nonneg(rho):
    if np.any(np.asarray(rho) < 0.0):
        raise DomainError("density must be nonnegative")


def _quad_checked(fn, a, b, what):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        val, err = quad(fn, a, b, **_QUAD_KW)
    if not np.isfinite(val) or err > 1e-7 * max(1.0, abs(val)):
        raise ConfigurationError(
            f"quadrature for {what} did not converge on ({a}, {b}): "
            f"value={val}, error estimate={err}"
        )
    return val


def _mapped(fn, x):
    """Apply a scalar function, preserving scalar/array shape."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        return fn(float(arr))
    return np.array([fn(float(v)) for v in arr.ravel()]).reshape(arr.shape)


class EosSpec:
    """A barotropic equation of state with its convex potential.

    Use the ``polytrope`` or ``generalized`` constructors.  Instances are
    immutable after construction and safe to share between threads.
    """

    def __init__(self, kind, c=None, gamma=None, p_prime_fn=None,
                 n_large=None, n_small=None, label=None):
        self.kind = kind
        self.c = c
        self.gamma = gamma
        self.p_prime_fn = p_prime_fn
        self.n_large = n_large
        self.n_small = n_small
        self.label = label or kind
        self._phi_prime_memo = {}

    @classmethod
    def polytrope(cls, c, gamma):
        """P = c * rho**gamma.  Requires c > 0 and gamma > 1.

        Values 1 < gamma <= 4/3 are constructible (they are needed to
        exercise the non-compact regime) but fail ``validate_assumptions``.
        """
        if c <= 0.0:
            raise DomainError("polytrope coefficient c must be positive")
        if gamma <= 1.0:
            raise DomainError("polytrope exponent gamma must exceed 1")
        return cls("polytrope", c=float(c), gamma=float(gamma),
                   label=f"polytrope(c={c}, gamma={gamma})")

    @classmethod
    def generalized(cls, p_prime, n_large, n_small, label="generalized"):
        """EOS given by its pressure derivative P'(tau) > 0.

        ``n_large`` and ``n_small`` are the declared growth exponents:
        P' ~ tau**(1/n_large) for large tau and <= C tau**(1/n_small) for
        small tau; both should lie in (0, 3) for the variational theory.
        """
        if not (0.0 < n_large < 3.0) or not (0.0 < n_small < 3.0):
            raise DomainError("declared growth exponents must lie in (0, 3)")
        return cls("generalized", p_prime_fn=p_prime,
                   n_large=float(n_large), n_small=float(n_small), label=label)

    @property
    def poly_index(self):
        """Polytropic index n = 1/(gamma-1); polytropes only."""
        if self.kind != "polytrope":
            raise DomainError("poly_index is defined for polytropes only")
        return 1.0 / (self.gamma - 1.0)

    # -- the four basic maps ------------------------------------------------

    def p_prime(self, rho):
        _check_nonneg(rho)
        if self.kind == "polytrope":
            return self.c * self.gamma * np.asarray(rho, float) ** (self.gamma - 1.0)
        return _mapped(self.p_prime_fn, rho)

    def pressure(self, rho):
        """P(rho); P(0) = 0, strictly increasing."""
        _check_nonneg(rho)
        if self.kind == "polytrope":
            return self.c * np.asarray(rho, float) ** self.gamma

        def scalar(r):
            if r == 0.0:
                return 0.0
            return _quad_checked(self.p_prime_fn, 0.0, r, "P")

        return _mapped(scalar, rho)

    def phi(self, rho):
        """Energy density Phi(rho) with Phi(0) = Phi'(0) = 0."""
        _check_nonneg(rho)
        if self.kind == "polytrope":
            return self.c / (self.gamma - 1.0) * np.asarray(rho, float) ** self.gamma

        def scalar(r):
            if r == 0.0:
                return 0.0
            return _quad_checked(lambda s: self._phi_prime_scalar(s), 0.0, r, "Phi")

        return _mapped(scalar, rho)

    def _phi_prime_scalar(self, r):
        if r == 0.0:
            return 0.0
        got = self._phi_prime_memo.get(r)
        if got is None:
            got = _quad_checked(lambda t: self.p_prime_fn(t) / t, 0.0, r, "Phi'")
            self._phi_prime_memo[r] = got
        return got

    def phi_prime(self, rho):
        """Phi'(rho), the chemical-potential-like derivative; 0 at rho = 0."""
        _check_nonneg(rho)
        if self.kind == "polytrope":
            g = self.gamma
            return self.c * g / (g - 1.0) * np.asarray(rho, float) ** (g - 1.0)
        return _mapped(self._phi_prime_scalar, rho)

    def phi_second(self, rho):
        """Phi''(rho) = P'(rho)/rho, exact by the defining relation."""
        rho_arr = np.asarray(rho, dtype=float)
        _check_nonneg(rho_arr)
        return self.p_prime(rho_arr) / rho_arr

    def phi_prime_inv(self, z):
        """Inverse of Phi' extended by 0 on z <= 0 (total function)."""
        if self.kind == "polytrope":
            g = self.gamma
            zp = np.maximum(np.asarray(z, float), 0.0)
            out = ((g - 1.0) * zp / (self.c * g)) ** (1.0 / (g - 1.0))
            return out if out.ndim else float(out)

        def scalar(zz):
            if zz <= 0.0:
                return 0.0
            lo, hi = 1.0, 1.0
            for _ in range(200):
                if self._phi_prime_scalar(hi) >= zz:
                    break
                hi *= 4.0
            else:
                raise NumericalError(
                    f"phi_prime_inv: no upper bracket for z={zz}; "
                    f"Phi'({hi}) = {self._phi_prime_scalar(hi)}"
                )
            for _ in range(200):
                if self._phi_prime_scalar(lo) <= zz:
                    break
                lo /= 4.0
            else:
                raise NumericalError(
                    f"phi_prime_inv: no lower bracket for z={zz}; "
                    f"Phi'({lo}) = {self._phi_prime_scalar(lo)}"
                )
            try:
                return brentq(lambda r: self._phi_prime_scalar(r) - zz,
                              lo, hi, rtol=1e-12, maxiter=200)
            except RuntimeError as exc:
                raise NumericalError(
                    f"phi_prime_inv: root find failed for z={zz} "
                    f"in bracket [{lo}, {hi}]"
                ) from exc

        return _mapped(scalar, z)

    def sound_speed(self, rho):
        """c_s = sqrt(P'(rho))."""
        return np.sqrt(self.p_prime(rho))

    def describe(self):
        if self.kind == "polytrope":
            return {"kind": "polytrope", "c": self.c, "gamma": self.gamma}
        return {"kind": "generalized", "label": self.label,
                "n_large": self.n_large, "n_small": self.n_small}


# -- built-in generalized profiles ------------------------------------------

def _soft_stiff_p_prime(tau):
    # stiffens from P' ~ tau^(1/2) at low density to ~ tau^(2/3) at high
    return 3.0 * tau ** 0.5 * (1.0 + tau) ** (1.0 / 6.0)


BUILTIN_GENERALIZED = {
    "soft_stiff": lambda: EosSpec.generalized(
        _soft_stiff_p_prime, n_large=1.5, n_small=2.0, label="soft_stiff"),
}


def builtin_generalized(name):
    try:
        return BUILTIN_GENERALIZED[name]()
    except KeyError:
        raise ConfigurationError(
            f"unknown generalized EOS profile {name!r}; "
            f"available: {sorted(BUILTIN_GENERALIZED)}"
        ) from None


# -- assumption validation ---------------------------------------------------

@dataclass
class EosValidationReport:
    strictly_convex: bool
    p_prime_positive: bool
    n_large: float
    n_small: float
    c_large: float
    c_small: float
    large_ok: bool
    small_ok: bool

    @property
    def passed(self):
        return (self.strictly_convex and self.p_prime_positive
                and self.large_ok and self.small_ok)


def _fit_exponent(eos, window, n_samples=25):
    rho = np.geomspace(window[0], window[1], n_samples)
    phi = np.asarray(eos.phi(rho))
    slope = np.polyfit(np.log(rho), np.log(phi), 1)[0]
    if slope <= 1.0:
        return np.inf, np.nan, slope
    n = 1.0 / (slope - 1.0)
    const = phi / rho ** (1.0 + 1.0 / n)
    return n, const, slope


def validate_assumptions(eos, sample_range=(1e-6, 1e6)):
    """Check strict convexity and the two-sided growth bounds on Phi.

    The small-density window is the bottom four decades of ``sample_range``
    and the large-density window the top four; exponents are fitted on
    log-log samples.  Report only, never raises for a failing EOS.
    """
    lo, hi = sample_range
    if not (0.0 < lo < hi):
        raise DomainError("sample_range must satisfy 0 < lo < hi")

    rho = np.geomspace(lo, hi, 200)
    phi = np.asarray(eos.phi(rho))
    second = np.diff(np.diff(phi) / np.diff(rho))
    strictly_convex = bool(np.all(second > 0.0))
    p_prime_positive = bool(np.all(np.asarray(eos.p_prime(rho)) > 0.0))

    n_small, c_small_arr, _ = _fit_exponent(eos, (lo, lo * 1e4))
    n_large, c_large_arr, _ = _fit_exponent(eos, (hi * 1e-4, hi))
    large_ok = bool(0.0 < n_large < 3.0 - 1e-9)
    small_ok = bool(0.0 < n_small < 3.0 - 1e-9)

    return EosValidationReport(
        strictly_convex=strictly_convex,
        p_prime_positive=p_prime_positive,
        n_large=float(n_large),
        n_small=float(n_small),
        c_large=float(np.min(c_large_arr)) if large_ok else float("nan"),
        c_small=float(np.max(c_small_arr)) if small_ok else float("nan"),
        large_ok=large_ok,
        small_ok=small_ok,
    )

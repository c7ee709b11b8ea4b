"""Exact singular solutions: the cone 1 - r and the family 1 - r^(2/(1+p)).

Both solve -Delta u = a (1-u)^(-p) exactly with the matched amplitude, are
singular at the origin (sup u = 1), and have linearized potential
f'(u(r)) = kappa / r^2, which is what makes the Hardy certificate exact for
them.  They expose the same sampling surface as solved profiles so every
theorem check runs unchanged on singular inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .nonlinearity import Nonlinearity, PowerBlowup, bc_amplitude

KIND_CONE = "cone"
KIND_BRUERA_CABRE = "bruera-cabre"


@dataclass(frozen=True)
class ClosedFormSolution:
    """u(r) = 1 - r^beta on (0, 1], with its matched power nonlinearity."""

    kind: str
    n: int
    p: float
    a: float
    beta: float
    kappa: float
    lambda_s: float
    F1_finite: bool

    sup_u = 1.0
    is_singular = True

    @property
    def r_end(self) -> float:
        return 1.0

    @property
    def ur1(self) -> float:
        return -self.beta

    def u_at(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=np.float64)
        return 1.0 - r ** self.beta

    def ur_at(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=np.float64)
        return -self.beta * r ** (self.beta - 1.0)

    def urr_at(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=np.float64)
        return -self.beta * (self.beta - 1.0) * r ** (self.beta - 2.0)

    def matched_spec(self) -> PowerBlowup:
        """The nonlinearity this function solves exactly (lam = 1)."""
        return PowerBlowup(self.a, self.p)

    def normalized_spec(self) -> PowerBlowup:
        """Unit-amplitude family; the closed form then solves -Du = lambda_s f(u)."""
        return PowerBlowup(1.0, self.p)

    def weighted_gradient_integral_exact(self) -> float:
        """int_0^1 u_r^2/t dt in closed form; +inf when p >= 1."""
        if self.p >= 1.0:
            return math.inf
        return self.beta ** 2 * (1.0 + self.p) / (2.0 * (1.0 - self.p))

    def sample_radii(self, count: int = 256) -> np.ndarray:
        return np.geomspace(1e-8, 1.0, count)


def _power_solution(kind: str, n: int, p: float) -> ClosedFormSolution:
    if n < 2:
        raise DomainError(f"dimension n={n} must be >= 2")
    if p <= 0.0:
        raise DomainError(f"exponent p={p!r} must be positive")
    beta = 2.0 / (1.0 + p)
    a = bc_amplitude(n, p)
    return ClosedFormSolution(
        kind=kind, n=n, p=p, a=a, beta=beta,
        kappa=p * a, lambda_s=a, F1_finite=p < 1.0,
    )


def cone_solution(n: int) -> ClosedFormSolution:
    """1 - |x| solving -Delta u = (n-1)/(1-u); kappa = n - 1.

    Stored as its own kind: the p -> 1 limit of the power family has
    amplitude n, not the cone's n - 1, so the two must not be conflated.
    """
    if n < 2:
        raise DomainError(f"dimension n={n} must be >= 2")
    return ClosedFormSolution(
        kind=KIND_CONE, n=n, p=1.0, a=float(n - 1), beta=1.0,
        kappa=float(n - 1), lambda_s=float(n - 1), F1_finite=False,
    )


def bc_singular_solution(n: int, p: float) -> ClosedFormSolution:
    """1 - |x|^(2/(1+p)) solving -Delta u = a (1-u)^(-p), constructed for n >= 3.

    p in (0, 1) gives the finite-primitive members; p = 2 is admitted for
    the singular MEMS profile.
    """
    if n < 3:
        raise DomainError(f"the singular family is constructed for n >= 3, got n={n}")
    return _power_solution(KIND_BRUERA_CABRE, n, p)


def mems_singular_solution(n: int) -> ClosedFormSolution:
    """u = 1 - r^(2/3) against lambda_s (1-u)^(-2), lambda_s = (6n-8)/9.

    The residual identity is pure algebra and holds for every n >= 2, so
    this accessor is not gated at n >= 3 (the dimension scans need n = 2).
    """
    return _power_solution(KIND_BRUERA_CABRE, n, 2.0)


def residual(obj, spec: Nonlinearity, radii, lam: float = 1.0) -> float:
    """max |u_rr + ((n-1)/r) u_r + lam f(u)| over the sample radii.

    Exact pairs stay at floating-point error (<= 1e-10); a mismatched pair
    is reported O(1), never raised.
    """
    radii = np.asarray(radii, dtype=np.float64)
    u = obj.u_at(radii)
    ur = obj.ur_at(radii)
    urr = obj.urr_at(radii)
    f = np.array([lam * spec.f(float(t)) for t in u])
    return float(np.abs(urr + (obj.n - 1.0) / radii * ur + f).max())


def linearized_kappa(sol: ClosedFormSolution) -> float:
    """Coefficient of the exact 1/r^2 linearized potential, f'(u(r)) r^2."""
    return sol.kappa


def stable_p_range(n: int, tol: float = 1e-12) -> tuple[float, float] | None:
    """Sub-range of p in (0, 1) whose singular member is Hardy-stable.

    kappa(p) = p a(p) is increasing on (0, 1); returns (0, p*] with p* the
    crossing of kappa = (n-2)^2/4, the whole interval when even p -> 1 is
    stable, or None when no p in (0, 1) qualifies.
    """
    if n < 3:
        raise DomainError(f"the singular family needs n >= 3, got n={n}")
    hardy = 0.25 * (n - 2) ** 2

    def kappa(p: float) -> float:
        return p * bc_amplitude(n, p)

    if kappa(1.0) <= hardy:
        return (0.0, 1.0)
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if kappa(mid) <= hardy:
            lo = mid
        else:
            hi = mid
    p_star = 0.5 * (lo + hi)
    if p_star <= tol:
        return None
    return (0.0, p_star)

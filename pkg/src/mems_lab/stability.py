"""Three independent stability tests for radial profiles.

* Sturm disconjugacy: the linearized solution phi (regular at the center)
  has no zero in (0, 1) iff the stability quadratic form is nonnegative.
* Principal-eigenvalue shooting: bisection on mu using the first zero
  z(mu) of phi for the shifted potential q + mu; z is strictly decreasing
  in mu, and mu_1 solves z(mu) = 1.
* Hardy certificate: for exact kappa/r^2 potentials (the closed forms),
  stability is equivalent to kappa <= (n-2)^2/4, the optimal Hardy
  constant, decided by arithmetic alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from . import _core_py
from .backend import get_kernel, pure_kernel
from .errors import BracketExhausted, StepLimitExceeded, StepSizeUnderflow
from .nonlinearity import ConstantNonlinearity, Nonlinearity, PowerBlowup
from .radial_ode import DEFAULT_OPTIONS, RadialProfile, SolverOptions

FIRST_ZERO_MARGIN = 1e-6   # marginal band on the first-zero location
MU_MARGIN = 1e-8           # marginal band on mu_1
MU_BISECT_TOL = 1e-8


class Method(str, Enum):
    DISCONJUGACY = "disconjugacy"
    EIGENVALUE_SHOOTING = "eigenvalue_shooting"
    HARDY_CERTIFICATE = "hardy_certificate"


class Verdict(str, Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    MARGINAL = "marginal"


@dataclass(frozen=True)
class StabilityReport:
    method: Method
    verdict: Verdict
    first_zero: float | None = None
    mu1: float | None = None
    kappa: float | None = None
    hardy_constant: float | None = None

    def to_json_dict(self) -> dict:
        out = {"method": self.method.value, "verdict": self.verdict.value}
        if self.first_zero is not None:
            out["first_zero"] = self.first_zero
        if self.mu1 is not None:
            out["mu1"] = self.mu1
        if self.kappa is not None:
            out["kappa"] = self.kappa
        if self.hardy_constant is not None:
            out["hardy_constant"] = self.hardy_constant
        return out


@dataclass(frozen=True)
class ConstantPotential:
    """q(r) == value."""

    value: float


@dataclass(frozen=True)
class LinearizedPotential:
    """q(r) = lam * f'(u(r)) along the profile."""

    spec: Nonlinearity
    lam: float


Potential = ConstantPotential | LinearizedPotential


def linearized_potential(profile: RadialProfile, spec: Nonlinearity) -> LinearizedPotential:
    if profile.lam is None:
        raise ValueError("profile carries no lambda; shoot on the unit ball first")
    return LinearizedPotential(spec, profile.lam)


def _require_unit_ball(profile: RadialProfile) -> None:
    if abs(profile.r_end - 1.0) > 1e-9:
        raise ValueError(f"stability tests need a unit-ball profile, r_end={profile.r_end}")


def _phi_shoot(profile: RadialProfile, potential: Potential, mu: float,
               opts: SolverOptions, scale: float):
    """(code, radius) of the first zero of phi for the shifted potential."""
    if isinstance(potential, ConstantPotential):
        return get_kernel().phi_first_zero(
            _core_py.POT_CONST, potential.value, 0.0, 0.0, mu,
            profile.n, profile.m, profile.g_center, profile.r0,
            profile.r_nodes, profile.y_nodes, profile.h_seg, profile.dense,
            opts.r0, 1.0, opts.rtol, opts.atol, opts.max_steps, True, scale,
        )
    spec = potential.spec
    if isinstance(spec, PowerBlowup):
        # q = lam * a * p * (1-u)^(-p-1), nonincreasing in r since u decreases
        return get_kernel().phi_first_zero(
            _core_py.POT_POWER, spec.a, spec.p, potential.lam, mu,
            profile.n, profile.m, profile.g_center, profile.r0,
            profile.r_nodes, profile.y_nodes, profile.h_seg, profile.dense,
            opts.r0, 1.0, opts.rtol, opts.atol, opts.max_steps, True, scale,
        )
    if isinstance(spec, ConstantNonlinearity):
        return get_kernel().phi_first_zero(
            _core_py.POT_CONST, 0.0, 0.0, 0.0, mu,
            profile.n, profile.m, profile.g_center, profile.r0,
            profile.r_nodes, profile.y_nodes, profile.h_seg, profile.dense,
            opts.r0, 1.0, opts.rtol, opts.atol, opts.max_steps, True, scale,
        )

    def q_at(r: float) -> float:
        return potential.lam * spec.fprime(float(profile.u_at(r)[0]))

    return pure_kernel().phi_first_zero_callable(
        q_at, mu, profile.n, opts.r0, 1.0, opts.rtol, opts.atol,
        opts.max_steps, scale,
    )


def _check_phi_code(code: int, where: float) -> None:
    if code == _core_py.STATUS_STEP_UNDERFLOW:
        raise StepSizeUnderflow(f"linearized shoot underflowed near r={where!r}")
    if code == _core_py.STATUS_STEP_LIMIT:
        raise StepLimitExceeded(f"linearized shoot exceeded step budget at r={where!r}")


def disconjugacy_test(profile: RadialProfile, potential: Potential,
                      opts: SolverOptions | None = None,
                      scale: float = 1.0) -> StabilityReport:
    """Stable iff phi stays positive on (0, 1); zero location is bisection-polished.

    The verdict is invariant under phi -> c phi; ``scale`` exists to let
    tests exercise exactly that.
    """
    _require_unit_ball(profile)
    opts = opts or DEFAULT_OPTIONS
    code, z = _phi_shoot(profile, potential, 0.0, opts, scale)
    _check_phi_code(code, z)
    if code == _core_py.PHI_ZERO_FOUND:
        verdict = Verdict.MARGINAL if z > 1.0 - FIRST_ZERO_MARGIN else Verdict.UNSTABLE
        return StabilityReport(Method.DISCONJUGACY, verdict, first_zero=z)
    return StabilityReport(Method.DISCONJUGACY, Verdict.STABLE)


def _sup_potential(profile: RadialProfile, potential: Potential) -> float:
    if isinstance(potential, ConstantPotential):
        return max(potential.value, 0.0)
    spec = potential.spec
    if isinstance(spec, (PowerBlowup, ConstantNonlinearity)):
        # f' nondecreasing and u <= m: the sup sits at the center
        return potential.lam * spec.fprime(profile.m)
    us = profile.u_at(profile.sample_radii())
    return max(potential.lam * spec.fprime(float(u)) for u in us)


def principal_eigenvalue(profile: RadialProfile, potential: Potential,
                         opts: SolverOptions | None = None,
                         collect: list | None = None) -> StabilityReport:
    """mu_1 by bisection on the first-zero map z(mu), |error| <= 1e-8.

    The bracket is [-M, M] with M = 10 (1 + sup q) + 4 n^2; the n^2 term
    covers small potentials, whose mu_1 approaches the ball's principal
    Laplacian eigenvalue (~ n^2 scale).  ``collect``, when given, receives
    the (mu, z) bisection trajectory for Sturm-monotonicity assertions.
    """
    _require_unit_ball(profile)
    opts = opts or DEFAULT_OPTIONS
    n = profile.n
    M = 10.0 * (1.0 + _sup_potential(profile, potential)) + 4.0 * n * n

    def zero_before_boundary(mu: float) -> bool:
        code, z = _phi_shoot(profile, potential, mu, opts, 1.0)
        _check_phi_code(code, z)
        found = code == _core_py.PHI_ZERO_FOUND and z <= 1.0
        if collect is not None and code == _core_py.PHI_ZERO_FOUND:
            collect.append((mu, z))
        return found

    if zero_before_boundary(-M):
        raise BracketExhausted(f"z(-M) <= 1 at M={M}: mu_1 below the bracket")
    if not zero_before_boundary(M):
        raise BracketExhausted(f"z(M) > 1 at M={M}: mu_1 above the bracket")

    lo, hi = -M, M
    while hi - lo > MU_BISECT_TOL:
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if zero_before_boundary(mid):
            hi = mid
        else:
            lo = mid
    mu1 = 0.5 * (lo + hi)
    if mu1 > MU_MARGIN:
        verdict = Verdict.STABLE
    elif mu1 < -MU_MARGIN:
        verdict = Verdict.UNSTABLE
    else:
        verdict = Verdict.MARGINAL
    return StabilityReport(Method.EIGENVALUE_SHOOTING, verdict, mu1=mu1)


def hardy_certificate(kappa: float, n: int, tol: float = 1e-12) -> StabilityReport:
    """Exact test for kappa/r^2 potentials against the optimal Hardy constant.

    Stable iff kappa <= (n-2)^2/4; equality within ``tol`` is Marginal
    (never Stable), matching the sharpness of the inequality.
    """
    if n < 2:
        raise ValueError(f"dimension n={n} must be >= 2")
    if kappa < 0.0:
        raise ValueError(f"kappa={kappa!r} must be nonnegative")
    hardy = 0.25 * (n - 2) ** 2
    if abs(kappa - hardy) <= tol:
        verdict = Verdict.MARGINAL
    elif kappa < hardy:
        verdict = Verdict.STABLE
    else:
        verdict = Verdict.UNSTABLE
    return StabilityReport(
        Method.HARDY_CERTIFICATE, verdict, kappa=kappa, hardy_constant=hardy,
    )

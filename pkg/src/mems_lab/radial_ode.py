"""Radial initial value solver and the weighted quadratures built on it.

Integrates u'' + ((n-1)/r) u' + g(u) = 0 outward from the removable
singularity at r = 0 (second-order series start at r0), with dense output,
zero-crossing detection and blow-up guards.  Quadratures of u_r against the
singular weights 1/t and r^(n-1) are evaluated per dense-output segment by
Gauss-Legendre rules, with an analytic series head below r_cut.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import _core_py
from .backend import get_kernel, pure_kernel
from .errors import (
    InvalidCenter,
    ProfileInvariantViolation,
    ProfileRangeError,
    StepLimitExceeded,
    StepSizeUnderflow,
)
from .nonlinearity import ConstantNonlinearity, Nonlinearity, PowerBlowup

DEFAULT_R0 = 1e-6
FLUX_SLACK = 1e-9

_GL15_X, _GL15_W = np.polynomial.legendre.leggauss(15)
_GL7_X, _GL7_W = np.polynomial.legendre.leggauss(7)


@dataclass(frozen=True)
class SolverOptions:
    """Tolerances and guards for the adaptive integrator."""

    rtol: float = 1e-10
    atol: float = 1e-12
    eps_blow: float = 1e-9
    r_max: float = 1e3
    r0: float = DEFAULT_R0
    max_steps: int = 2_000_000

    def to_dict(self) -> dict:
        return {
            "rtol": self.rtol,
            "atol": self.atol,
            "eps_blow": self.eps_blow,
            "r_max": self.r_max,
            "r0": self.r0,
            "max_steps": self.max_steps,
        }


DEFAULT_OPTIONS = SolverOptions()


class ShootStatus(Enum):
    HIT_ZERO = "hit_zero"
    BLEW_UP = "blew_up"
    MAX_RADIUS = "max_radius"


_STATUS_MAP = {
    _core_py.STATUS_HIT_ZERO: ShootStatus.HIT_ZERO,
    _core_py.STATUS_BLEW_UP: ShootStatus.BLEW_UP,
    _core_py.STATUS_MAX_RADIUS: ShootStatus.MAX_RADIUS,
}


@dataclass
class RadialProfile:
    """A solved radial function on [r0, r_end] with dense output.

    ``dense[i, c, j]`` is the theta^(j+1) interpolation coefficient of
    component c (0: u, 1: u_r) on segment i, valid for r in
    [r_nodes[i], r_nodes[i] + h_seg[i]]; below r0 the quadratic series
    u = m - g_c r^2/(2n) applies.  ``g_center`` is the effective right-hand
    side at the center (lam * f(m)).  Immutable by convention once built.
    """

    n: int
    m: float
    r_nodes: np.ndarray
    y_nodes: np.ndarray
    h_seg: np.ndarray
    dense: np.ndarray
    r0: float
    g_center: float
    lam: float | None = None

    @property
    def r_end(self) -> float:
        return float(self.r_nodes[-1])

    @property
    def ur1(self) -> float:
        """u_r at the outer boundary node."""
        return float(self.y_nodes[-1, 1])

    @property
    def sup_u(self) -> float:
        return self.m

    is_singular = False

    def eval_many(self, r) -> tuple[np.ndarray, np.ndarray]:
        """(u, u_r) at the requested radii (series below r0, dense above)."""
        r = np.atleast_1d(np.asarray(r, dtype=np.float64))
        if r.size and (r.min() < 0.0 or r.max() > self.r_end * (1.0 + 1e-12)):
            raise ProfileRangeError(
                f"radius outside [0, {self.r_end}]: [{r.min()}, {r.max()}]"
            )
        u = np.empty_like(r)
        ur = np.empty_like(r)
        ser = r <= self.r0
        if ser.any():
            rs = r[ser]
            u[ser] = self.m - self.g_center * rs * rs / (2.0 * self.n)
            ur[ser] = -self.g_center * rs / self.n
        rest = ~ser
        if rest.any():
            rr = np.minimum(r[rest], self.r_end)
            i = np.clip(
                np.searchsorted(self.r_nodes, rr, side="right") - 1,
                0,
                len(self.h_seg) - 1,
            )
            h = self.h_seg[i]
            th = (rr - self.r_nodes[i]) / h
            qu = self.dense[i, 0, :]
            qw = self.dense[i, 1, :]
            u[rest] = self.y_nodes[i, 0] + h * th * (
                qu[:, 0] + th * (qu[:, 1] + th * (qu[:, 2] + th * qu[:, 3]))
            )
            ur[rest] = self.y_nodes[i, 1] + h * th * (
                qw[:, 0] + th * (qw[:, 1] + th * (qw[:, 2] + th * qw[:, 3]))
            )
        return u, ur

    def eval(self, r: float) -> tuple[float, float]:
        u, ur = self.eval_many([r])
        return float(u[0]), float(ur[0])

    def u_at(self, r) -> np.ndarray:
        return self.eval_many(r)[0]

    def ur_at(self, r) -> np.ndarray:
        return self.eval_many(r)[1]

    def urr_at(self, r) -> np.ndarray:
        """Second derivative from the dense u_r polynomial."""
        r = np.atleast_1d(np.asarray(r, dtype=np.float64))
        out = np.empty_like(r)
        ser = r <= self.r0
        out[ser] = -self.g_center / self.n
        rest = ~ser
        if rest.any():
            rr = np.minimum(r[rest], self.r_end)
            i = np.clip(
                np.searchsorted(self.r_nodes, rr, side="right") - 1,
                0,
                len(self.h_seg) - 1,
            )
            th = (rr - self.r_nodes[i]) / self.h_seg[i]
            qw = self.dense[i, 1, :]
            out[rest] = qw[:, 0] + th * (
                2.0 * qw[:, 1] + th * (3.0 * qw[:, 2] + th * 4.0 * qw[:, 3])
            )
        return out

    def sample_radii(self) -> np.ndarray:
        return self.r_nodes

    def validate(self, slack: float = FLUX_SLACK) -> None:
        """Assert the structural invariants every returned profile carries."""
        r = self.r_nodes
        u = self.y_nodes[:, 0]
        ur = self.y_nodes[:, 1]
        if not (np.diff(r) > 0).all():
            raise ProfileInvariantViolation("node radii not strictly increasing")
        if u.min() < -slack or u.max() > 1.0:
            raise ProfileInvariantViolation("u leaves [0, 1] beyond slack")
        if self.g_center > 0.0:
            if not (np.diff(u) < 0).all():
                raise ProfileInvariantViolation("u not strictly decreasing")
            if not (ur < 0).all():
                raise ProfileInvariantViolation("u_r not negative at nodes")
        flux = r ** (self.n - 1) * ur
        if len(flux) > 1 and np.diff(flux).max() > slack:
            raise ProfileInvariantViolation("r^(n-1) u_r increased beyond slack")
        sq = r ** (2 * self.n - 2) * ur * ur
        if len(sq) > 1 and np.diff(sq).min() < -slack:
            raise ProfileInvariantViolation("t^(2n-2) u_r^2 decreased beyond slack")
        if abs(r[0] ** (self.n - 1) * ur[0]) > 2.0 * self.g_center * r[0] ** self.n / self.n + slack:
            raise ProfileInvariantViolation("center flux exceeds series bound")


@dataclass
class ShootResult:
    """Outcome of one center shoot: termination status plus the profile."""

    status: ShootStatus
    profile: RadialProfile

    @property
    def R(self) -> float:
        """Radius where u vanished (meaningful for HIT_ZERO)."""
        return self.profile.r_end

    @property
    def r_blow(self) -> float:
        return self.profile.r_end


def _kernel_args(spec: Nonlinearity, lam: float):
    if isinstance(spec, PowerBlowup):
        return _core_py.KIND_POWER, spec.a, spec.p, lam
    if isinstance(spec, ConstantNonlinearity):
        return _core_py.KIND_CONST, spec.c, 0.0, lam
    return None


def series_start(n: int, spec: Nonlinearity, m: float, r0: float,
                 lam: float = 1.0) -> tuple[float, float]:
    """Second-order series values (u, u_r) at the start radius r0.

    Truncation error is O(r0^4), below integrator tolerance for the
    default r0 = 1e-6.
    """
    if not 0.0 <= m < 1.0:
        raise InvalidCenter(f"center value m={m!r} outside [0, 1)")
    g0 = lam * spec.f(m)
    return m - g0 * r0 * r0 / (2.0 * n), -g0 * r0 / n


def integrate(n: int, spec: Nonlinearity, m: float,
              opts: SolverOptions | None = None, lam: float = 1.0) -> ShootResult:
    """Shoot from the center until u hits zero, u blows up, or r = r_max."""
    if n < 2:
        raise InvalidCenter(f"dimension n={n} must be >= 2")
    if not 0.0 <= m < 1.0:
        raise InvalidCenter(f"center value m={m!r} outside [0, 1)")
    opts = opts or DEFAULT_OPTIONS
    args = _kernel_args(spec, lam)
    if args is not None:
        kind, ga, gp, glam = args
        status, r, y, h, q = get_kernel().shoot(
            kind, ga, gp, glam, n, m, opts.r0, opts.rtol, opts.atol,
            opts.eps_blow, opts.r_max, opts.max_steps,
        )
    else:
        status, r, y, h, q = pure_kernel().shoot_callable(
            lambda u: lam * spec.f(u), n, m, opts.r0, opts.rtol, opts.atol,
            opts.eps_blow, opts.r_max, opts.max_steps,
        )
    if status == _core_py.STATUS_STEP_UNDERFLOW:
        raise StepSizeUnderflow(f"step below 1e-15 at r ~ {r[-1]!r} (n={n}, m={m})")
    if status == _core_py.STATUS_STEP_LIMIT:
        raise StepLimitExceeded(f"exceeded {opts.max_steps} steps (n={n}, m={m})")
    profile = RadialProfile(
        n=n, m=m, r_nodes=r, y_nodes=y, h_seg=h, dense=q,
        r0=opts.r0, g_center=lam * spec.f(m), lam=None,
    )
    profile.validate()
    return ShootResult(status=_STATUS_MAP[status], profile=profile)


def eval_profile(profile: RadialProfile, r: float) -> tuple[float, float]:
    """(u, u_r) at radius r; series below r0, dense output above."""
    return profile.eval(r)


@dataclass
class QuadratureResult:
    """Value of a profile quadrature with its error estimate.

    ``divergent`` marks integrals whose dyadic tail fails the Cauchy
    criterion (expected exactly for singular profiles); the value is then
    +inf.
    """

    value: float
    abs_error: float
    divergent: bool = False
    tail_ratio: float | None = None


def _segment_quad(profile: RadialProfile, weight, r_lo: float, r_hi: float):
    """Integral of weight(r, u, ur) over [r_lo, r_hi] on dense segments.

    Gauss-Legendre 15 per segment; the 15-vs-7 point difference is the
    error estimate.  The integrand must be smooth within each segment.
    """
    nodes = profile.r_nodes
    inner = nodes[(nodes > r_lo) & (nodes < r_hi)]
    edges = np.concatenate([[r_lo], inner, [r_hi]])
    a = edges[:-1]
    b = edges[1:]
    mid = 0.5 * (a + b)[:, None]
    half = 0.5 * (b - a)[:, None]

    def rule(x, w):
        pts = (mid + half * x[None, :]).ravel()
        u, ur = profile.eval_many(pts)
        vals = weight(pts, u, ur).reshape(len(a), len(x))
        return float((vals @ w * (0.5 * (b - a))).sum())

    v15 = rule(_GL15_X, _GL15_W)
    v7 = rule(_GL7_X, _GL7_W)
    return v15, abs(v15 - v7)


def _dyadic_quad(obj, weight, k_max: int = 40, panels: int = 2):
    """Dyadic-interval quadrature toward t = 0 for sampling profiles.

    Integrates weight over [2^-k-1, 2^-k] for k = 0..k_max and extrapolates
    the geometric tail; a tail ratio >= 1 - 1e-9 (terms not vanishing) is
    reported as divergent, matching the Cauchy-criterion dichotomy.
    """
    terms = []
    for k in range(k_max + 1):
        b = 2.0 ** -k
        a = 0.5 * b
        edges = np.linspace(a, b, panels + 1)
        lo = edges[:-1]
        hi = edges[1:]
        mid = 0.5 * (lo + hi)[:, None]
        half = 0.5 * (hi - lo)[:, None]
        pts = (mid + half * _GL15_X[None, :]).ravel()
        u = obj.u_at(pts)
        ur = obj.ur_at(pts)
        vals = weight(pts, u, ur).reshape(panels, 15)
        terms.append(float((vals @ _GL15_W * (0.5 * (hi - lo))).sum()))
    total = sum(terms)
    ratio = terms[-1] / terms[-2] if terms[-2] != 0.0 else 0.0
    if terms[-1] > 0.0 and ratio >= 1.0 - 1e-9:
        return QuadratureResult(math.inf, math.inf, divergent=True, tail_ratio=ratio)
    tail = terms[-1] * ratio / (1.0 - ratio) if 0.0 < ratio < 1.0 else 0.0
    return QuadratureResult(total + tail, abs(tail) * 1e-6 + 1e-15 * abs(total),
                            tail_ratio=ratio)


def weighted_gradient_integral(obj) -> QuadratureResult:
    """int_0^1 u_r(t)^2 / t dt (without the (n-1) factor).

    Solved profiles: analytic series head g_c^2 r_cut^2 / (2 n^2) on
    [0, r_cut] plus segment quadrature on [r_cut, r_end].  Closed-form
    (sampling) profiles: dyadic quadrature with divergence detection.
    """
    if isinstance(obj, RadialProfile):
        r_cut = max(obj.r0, 1e-4)
        head = obj.g_center ** 2 * r_cut ** 2 / (2.0 * obj.n ** 2)
        v, err = _segment_quad(obj, lambda r, u, ur: ur * ur / r, r_cut, obj.r_end)
        return QuadratureResult(head + v, err + 1e-16 * head)
    return _dyadic_quad(obj, lambda r, u, ur: ur * ur / r)


def surface_area(n: int) -> float:
    """omega_n = |S^(n-1)| = 2 pi^(n/2) / Gamma(n/2)."""
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


def sobolev_norm(obj, r_lo: float, r_hi: float) -> float:
    """omega_n int_{r_lo}^{r_hi} r^(n-1) u_r^2 dr (the Dirichlet energy)."""
    if not 0.0 <= r_lo < r_hi:
        raise ProfileRangeError(f"bad annulus [{r_lo}, {r_hi}]")
    om = surface_area(obj.n)
    weight = lambda r, u, ur: r ** (obj.n - 1) * ur * ur  # noqa: E731
    if isinstance(obj, RadialProfile):
        if r_hi > obj.r_end * (1.0 + 1e-12):
            raise ProfileRangeError(f"r_hi={r_hi} beyond profile end {obj.r_end}")
        total = 0.0
        if r_lo < obj.r0:
            # series head: u_r = -g_c r / n
            hi = min(r_hi, obj.r0)
            total += (obj.g_center / obj.n) ** 2 * (
                hi ** (obj.n + 2) - r_lo ** (obj.n + 2)
            ) / (obj.n + 2)
            r_lo = hi
        if r_lo < r_hi:
            v, _ = _segment_quad(obj, weight, r_lo, min(r_hi, obj.r_end))
            total += v
        return om * total
    beta = getattr(obj, "beta", None)
    if beta is not None:
        # u = 1 - r^beta: the energy integral is an exact power
        e = obj.n + 2.0 * beta - 2.0
        return om * beta * beta * (r_hi ** e - r_lo ** e) / e
    # sampling profile: geometric panels resolve the power behaviour at 0
    k = max(8, 2 * int(math.ceil(math.log2(max(r_hi / max(r_lo, 1e-300), 2.0)))))
    edges = np.geomspace(max(r_lo, 1e-300), r_hi, k + 1)
    lo = edges[:-1]
    hi = edges[1:]
    mid = 0.5 * (lo + hi)[:, None]
    half = 0.5 * (hi - lo)[:, None]
    pts = (mid + half * _GL15_X[None, :]).ravel()
    vals = weight(pts, obj.u_at(pts), obj.ur_at(pts)).reshape(k, 15)
    return om * float((vals @ _GL15_W * (0.5 * (hi - lo))).sum())

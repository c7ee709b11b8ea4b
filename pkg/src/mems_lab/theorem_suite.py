"""Mechanical verification of the lab's identities, inequalities and thresholds.

Each check measures both sides of one claim on a solved or closed-form
profile and records them with an explicit tolerance; the report is
machine-readable and deterministic for fixed settings.  Negative-control
fixtures (fabricated violations) carry ``expect = False`` and must fail,
otherwise the whole suite is rejected.

Margin conventions by check kind:

* ``identity``:    margin = |lhs - rhs| (relative where noted), pass iff
                   margin <= tolerance;
* ``inequality``:  margin = rhs - lhs, pass iff margin >= -tolerance;
* ``divergence``:  margin in {0, 1} for consistent/ inconsistent dichotomy,
                   pass iff margin <= tolerance;
* ``threshold``:   margin = rhs - lhs, pass iff (margin >= -tolerance)
                   equals params["expect_positive"].
"""

from __future__ import annotations

import datetime as _dt
import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .closed_forms import (
    ClosedFormSolution,
    cone_solution,
    bc_singular_solution,
    mems_singular_solution,
    residual,
)
from .errors import DimensionOutOfRange
from .nonlinearity import (
    NonlinearityFlags,
    PowerBlowup,
    crandall_rabinowitz_gamma,
    gamma_liminf_estimate,
    spec_to_dict,
)
from .radial_ode import (
    DEFAULT_OPTIONS,
    RadialProfile,
    SolverOptions,
    sobolev_norm,
    surface_area,
    weighted_gradient_integral,
)
from .shooting import default_m_grid, refine_fold, shoot_radius, sweep
from .stability import (
    LinearizedPotential,
    Verdict,
    disconjugacy_test,
    hardy_certificate,
)

# citation tags: stable identifiers of the claims being verified
CIT_ENERGY_IDENTITY = "radial-energy-identity"
CIT_FLUX = "flux-monotonicity"
CIT_ENERGY_BOUND = "dirichlet-energy-boundary-bound"
CIT_UR1 = "universal-boundary-derivative-bound"
CIT_SANDWICH = "primitive-sandwich"
CIT_DECAY = "gradient-decay"
CIT_HARDY = "hardy-threshold"
CIT_RESIDUAL = "exact-solution-residual"
CIT_GELFAND = "pull-in-diagram"
CIT_GAMMA = "asymptotic-convexity-ratio"
CIT_CONTROL = "negative-control"

IDENTITY_TOL = 1e-6
ANALYTIC_TOL = 1e-10
INEQ_SLACK = 1e-9


@dataclass
class CheckResult:
    name: str
    citation: str
    n: int
    params: dict
    lhs: float
    rhs: float
    margin: float
    tolerance: float
    passed: bool
    kind: str
    expect: bool = True

    def recompute_pass(self) -> bool:
        """Re-derive the pass flag from the stored numbers (self-consistency)."""
        if self.kind == "inequality":
            return self.margin >= -self.tolerance
        if self.kind in ("identity", "divergence"):
            return self.margin <= self.tolerance
        if self.kind == "threshold":
            return (self.margin >= -self.tolerance) == bool(
                self.params.get("expect_positive")
            )
        raise ValueError(f"unknown check kind {self.kind!r}")

    def to_json_dict(self) -> dict:
        return {
            "name": self.name,
            "citation": self.citation,
            "n": self.n,
            "params": self.params,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "kind": self.kind,
            "expect": self.expect,
        }


def _identity(name, citation, n, params, lhs, rhs, tol, expect=True) -> CheckResult:
    margin = abs(lhs - rhs)
    return CheckResult(name, citation, n, params, lhs, rhs, margin, tol,
                       margin <= tol, "identity", expect)


def _identity_rel(name, citation, n, params, lhs, rhs, tol, expect=True) -> CheckResult:
    margin = abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300)
    return CheckResult(name, citation, n, params, lhs, rhs, margin, tol,
                       margin <= tol, "identity", expect)


def _inequality(name, citation, n, params, lhs, rhs, tol, expect=True) -> CheckResult:
    margin = rhs - lhs
    passed = margin >= -tol if math.isfinite(margin) else (rhs == math.inf and math.isfinite(lhs))
    if not math.isfinite(lhs):
        passed = False
    return CheckResult(name, citation, n, params, lhs, rhs,
                       margin if math.isfinite(margin) else math.inf,
                       tol, passed, "inequality", expect)


def _threshold(name, citation, n, params, lhs, rhs, expect_positive, tol=0.0) -> CheckResult:
    params = dict(params, expect_positive=bool(expect_positive))
    margin = rhs - lhs
    passed = (margin >= -tol) == bool(expect_positive)
    return CheckResult(name, citation, n, params, lhs, rhs, margin, tol,
                       passed, "threshold")


# ---------------------------------------------------------------------------
# individual checks


def check_identity(obj, spec, lam: float = 1.0, tol: float = IDENTITY_TOL) -> CheckResult:
    """F at the sup of u against (n-1) int u_r^2/t dt + u_r(1)^2/2.

    For singular closed forms the two sides are compared analytically when
    both are finite; when the primitive diverges the check passes iff the
    weighted integral is detected divergent too (the dichotomy).
    """
    n = obj.n
    if isinstance(obj, RadialProfile):
        lhs = lam * spec.F(obj.m)
        quad = weighted_gradient_integral(obj)
        rhs = (n - 1.0) * quad.value + 0.5 * obj.ur1 ** 2
        params = {"m": obj.m, "lam": lam, "spec": spec_to_dict(spec),
                  "quad_error": quad.abs_error}
        return _identity_rel(f"energy-identity[n={n},p={getattr(spec, 'p', '?')},m={obj.m:g}]",
                             CIT_ENERGY_IDENTITY, n, params, lhs, rhs, tol)
    # closed form: sup u = 1
    exact = obj.weighted_gradient_integral_exact()
    F1 = lam * spec.F_at_blowup()
    quad = weighted_gradient_integral(obj)
    params = {"kind": obj.kind, "p": obj.p, "lam": lam,
              "dyadic_divergent": quad.divergent}
    name = f"energy-identity-closed[{obj.kind},n={n},p={obj.p:g}]"
    if math.isinf(exact) or math.isinf(F1):
        consistent = math.isinf(exact) and math.isinf(F1) and quad.divergent
        margin = 0.0 if consistent else 1.0
        return CheckResult(name, CIT_ENERGY_IDENTITY, n, params,
                           F1, math.inf if math.isinf(exact) else (n - 1.0) * exact,
                           margin, 0.0, margin <= 0.0, "divergence")
    rhs = (n - 1.0) * exact + 0.5 * obj.ur1 ** 2
    params["dyadic_value"] = (n - 1.0) * quad.value + 0.5 * obj.ur1 ** 2
    return _identity_rel(name, CIT_ENERGY_IDENTITY, n, params, F1, rhs, ANALYTIC_TOL)


def _sample_radii(obj) -> np.ndarray:
    return obj.sample_radii() if not isinstance(obj, RadialProfile) else obj.r_nodes


def check_flux_monotonicity(obj, slack: float = INEQ_SLACK) -> CheckResult:
    """r^(n-1) u_r nonincreasing, t^(2n-2) u_r^2 nondecreasing, tiny center flux."""
    n = obj.n
    r = _sample_radii(obj)
    ur = obj.ur_at(r)
    flux = r ** (n - 1) * ur
    sq = r ** (2 * n - 2) * ur * ur
    worst = max(float(np.diff(flux).max()), float(-np.diff(sq).min()))
    params = {"flux_max_increase": float(np.diff(flux).max()),
              "sq_max_decrease": float(-np.diff(sq).min())}
    if isinstance(obj, RadialProfile):
        center_excess = abs(flux[0]) - 2.0 * obj.g_center * r[0] ** n / obj.n
        worst = max(worst, float(center_excess))
        params["center_flux_excess"] = float(center_excess)
    label = "profile" if isinstance(obj, RadialProfile) else getattr(obj, "kind", "sampled")
    return _inequality(f"flux-monotone[{label},n={n}]", CIT_FLUX, n, params,
                       worst, 0.0, slack)


def check_energy_bound(obj, slack: float = INEQ_SLACK) -> CheckResult:
    """Dirichlet energy over the ball bounded by omega_n |u_r(1)|."""
    n = obj.n
    if isinstance(obj, RadialProfile):
        lhs = sobolev_norm(obj, obj.r0, obj.r_end)
    else:
        lhs = sobolev_norm(obj, 0.0, 1.0)
    ur1 = obj.ur1
    rhs = surface_area(n) * abs(ur1)
    label = "profile" if isinstance(obj, RadialProfile) else getattr(obj, "kind", "sampled")
    return _inequality(f"energy-bound[{label},n={n}]", CIT_ENERGY_BOUND, n,
                       {"ur1": float(ur1)}, lhs, rhs, slack)


def check_ur1_bound(obj, flags: NonlinearityFlags, slack: float = INEQ_SLACK,
                    n_radii: int = 50, name_suffix: str = "",
                    expect: bool = True) -> CheckResult:
    """|u_r(1)| <= 2 with the pointwise bound |u_r(t)| >= t |u_r(1)| and a
    concave auxiliary function Psi(t) = -n t^((n-1)/n) u_r(t^(1/n)).

    Applies to stable profiles of nondecreasing nonlinearities; recorded as
    not applicable otherwise.
    """
    n = obj.n
    name = f"boundary-derivative-bound[n={n}{name_suffix}]"
    if not flags.nondecreasing:
        return CheckResult(name, CIT_UR1, n, {"applicable": False},
                           0.0, 0.0, 0.0, slack, True, "inequality", expect)
    ur1 = abs(obj.ur1)
    t = np.linspace(1.0 / n_radii, 1.0, n_radii)
    pointwise = t * ur1 - np.abs(obj.ur_at(t))
    tg = np.linspace(1.0 / 64, 1.0, 64)
    psi = -n * tg ** ((n - 1.0) / n) * obj.ur_at(tg ** (1.0 / n))
    d2 = psi[:-2] - 2.0 * psi[1:-1] + psi[2:]
    worst = max(ur1 - 2.0, float(pointwise.max()), float(d2.max()))
    params = {
        "abs_ur1_minus_2": ur1 - 2.0,
        "pointwise_worst": float(pointwise.max()),
        "psi_convexity_worst": float(d2.max()),
        "applicable": True,
    }
    return _inequality(name, CIT_UR1, n, params, worst, 0.0, slack, expect)


def check_sandwich(obj, spec, lam: float, flags: NonlinearityFlags,
                   baseline_ratio: float | None = None,
                   slack: float = INEQ_SLACK) -> list[CheckResult]:
    """Lower bound u_r(1)^2/2 <= lam F(m); ratio lam F(m)/u_r(1)^2 finite,
    compared against the persisted per-dimension baseline when available.
    """
    n = obj.n
    if not 2 <= n <= 6:
        raise DimensionOutOfRange(f"sandwich bounds hold for 2 <= n <= 6, got n={n}")
    m = obj.m if isinstance(obj, RadialProfile) else obj.sup_u
    Fm = lam * spec.F(m)
    ur1 = obj.ur1
    out = [
        _inequality(f"sandwich-lower[n={n},m={m:g}]", CIT_SANDWICH, n,
                    {"m": m, "lam": lam}, 0.5 * ur1 * ur1, Fm, slack)
    ]
    ratio = Fm / (ur1 * ur1)
    rhs = baseline_ratio * 1.05 if baseline_ratio is not None else math.inf
    out.append(
        _inequality(f"sandwich-ratio[n={n},m={m:g}]", CIT_SANDWICH, n,
                    {"m": m, "lam": lam, "baseline": baseline_ratio},
                    ratio, rhs, slack)
    )
    if flags.nondecreasing and baseline_ratio is not None:
        out.append(
            _inequality(f"sandwich-universal[n={n},m={m:g}]", CIT_SANDWICH, n,
                        {"m": m, "lam": lam, "baseline": baseline_ratio},
                        Fm, 4.0 * baseline_ratio * 1.05, slack)
        )
    return out


def decay_exponent(n: int) -> float:
    """alpha(n) = -n/2 + sqrt(n-1) + 1."""
    return -n / 2.0 + math.sqrt(n - 1.0) + 1.0


def check_decay(obj, slack: float = INEQ_SLACK) -> CheckResult:
    """Exact half-annulus decay bound with constant 2^(n/2 + sqrt(n-1)).

    On [1/2, 1] the bound |u_r(t)| <= 2^(n/2+sqrt(n-1)) |u_r(1)| t^alpha is
    asserted exactly; below 1/2 only the shape ratio is recorded since the
    global constant is not explicit.
    """
    n = obj.n
    alpha = decay_exponent(n)
    cn = 2.0 ** (n / 2.0 + math.sqrt(n - 1.0))
    ur1 = abs(obj.ur1)
    t = np.linspace(0.5, 1.0, 64)
    excess = np.abs(obj.ur_at(t)) - cn * ur1 * t ** alpha
    r_floor = obj.r0 if isinstance(obj, RadialProfile) else 2.0 ** -40
    ks = np.arange(1, int(math.floor(-math.log2(max(r_floor, 1e-300)))) + 1)
    td = 2.0 ** -ks.astype(np.float64)
    td = td[td >= r_floor]
    shape = np.abs(obj.ur_at(td)) / (ur1 * td ** alpha) if len(td) else np.array([0.0])
    label = "profile" if isinstance(obj, RadialProfile) else getattr(obj, "kind", "sampled")
    params = {"alpha": alpha, "half_annulus_constant": cn,
              "shape_sup_ratio": float(shape.max())}
    return _inequality(f"decay-halfannulus[{label},n={n}]", CIT_DECAY, n, params,
                       float(excess.max()), 0.0, slack)


def check_residual(obj, spec, lam: float, tol: float, name: str,
                   count: int = 100, expect: bool = True) -> CheckResult:
    radii = np.linspace(1.0 / count, 1.0, count)
    res = residual(obj, spec, radii, lam)
    return CheckResult(name, CIT_RESIDUAL, obj.n,
                       {"lam": lam, "spec": spec_to_dict(spec)},
                       res, 0.0, res, tol, res <= tol, "identity", expect)


def check_gamma(p: float, tol: float = 1e-8) -> CheckResult:
    spec = PowerBlowup(1.0, p)
    est = gamma_liminf_estimate(spec)
    exact = crandall_rabinowitz_gamma(spec)
    return _identity(f"gamma-estimator[p={p:g}]", CIT_GAMMA, 0, {"p": p},
                     est, exact, tol)


# ---------------------------------------------------------------------------
# dimension scan


def dimension_scan(n_range, opts: SolverOptions | None = None,
                   m_anchor: float = 0.2) -> list[CheckResult]:
    """Per dimension: Hardy thresholds for the cone (flip at 7) and the
    singular MEMS profile (flip at 8), the sign of the integrability margin
    -n + 2 sqrt(n-1) + 2 (positive iff n <= 6), the singular residual, and
    a solved-profile sandwich anchor for 2 <= n <= 6.
    """
    opts = opts or DEFAULT_OPTIONS
    out: list[CheckResult] = []
    for n in n_range:
        if not 2 <= n <= 12:
            raise DimensionOutOfRange(f"dimension scan covers 2..12, got n={n}")
        hardy = 0.25 * (n - 2) ** 2

        cone = cone_solution(n)
        rep = hardy_certificate(cone.kappa, n)
        out.append(_threshold(f"cone-hardy[n={n}]", CIT_HARDY, n,
                              {"kappa": cone.kappa, "verdict": rep.verdict.value},
                              cone.kappa, hardy, expect_positive=(n >= 7)))

        sing = mems_singular_solution(n)
        rep = hardy_certificate(sing.kappa, n)
        out.append(_threshold(f"mems-singular-hardy[n={n}]", CIT_HARDY, n,
                              {"kappa": sing.kappa, "verdict": rep.verdict.value},
                              sing.kappa, hardy, expect_positive=(n >= 8)))

        margin = -n + 2.0 * math.sqrt(n - 1.0) + 2.0
        out.append(_threshold(f"integrability-margin[n={n}]", CIT_DECAY, n,
                              {"margin": margin}, 0.0, margin,
                              expect_positive=(n <= 6)))

        out.append(check_residual(
            sing, sing.normalized_spec(), sing.lambda_s, ANALYTIC_TOL,
            f"mems-singular-residual[n={n}]",
        ))

        if 2 <= n <= 6:
            spec = PowerBlowup(1.0, 2.0)
            shot = shoot_radius(n, spec, m_anchor, opts)
            rep = disconjugacy_test(shot.profile, LinearizedPotential(spec, shot.lam), opts)
            results = check_sandwich(shot.profile, spec, shot.lam, spec.flags())
            for res in results:
                res.params["anchor_stable"] = rep.verdict.value
            out.extend(results)
    return out


# ---------------------------------------------------------------------------
# negative controls


@dataclass
class _SyntheticRadial:
    """Fabricated sampling profile for negative-control fixtures."""

    n: int
    u_fn: Callable[[np.ndarray], np.ndarray]
    ur_fn: Callable[[np.ndarray], np.ndarray]
    urr_fn: Callable[[np.ndarray], np.ndarray]
    radii: np.ndarray

    sup_u = 1.0
    is_singular = True

    @property
    def r_end(self) -> float:
        return 1.0

    @property
    def ur1(self) -> float:
        return float(self.ur_fn(np.array([1.0]))[0])

    def u_at(self, r):
        return self.u_fn(np.asarray(r, dtype=np.float64))

    def ur_at(self, r):
        return self.ur_fn(np.asarray(r, dtype=np.float64))

    def urr_at(self, r):
        return self.urr_fn(np.asarray(r, dtype=np.float64))

    def sample_radii(self):
        return self.radii


def negative_controls() -> list[CheckResult]:
    """Fabricated violations that the suite must reject (expect = False)."""
    out = []

    # sign flip in u_r: the flux r^(n-1) u_r increases across it
    rs = np.linspace(0.2, 1.0, 5)
    urs = np.array([-1.0, -1.0, 0.5, -1.0, -1.0])
    flipped = _SyntheticRadial(
        n=3,
        u_fn=lambda r: 1.0 - r,
        ur_fn=lambda r: np.interp(r, rs, urs),
        urr_fn=lambda r: np.zeros_like(r),
        radii=rs,
    )
    res = check_flux_monotonicity(flipped)
    res.name = "nc-flux-sign-flip"
    res.citation = CIT_CONTROL
    res.expect = False
    out.append(res)

    # u = 1 - r^3: Psi is convex and |u_r(t)| < t |u_r(1)|
    cubic = _SyntheticRadial(
        n=3,
        u_fn=lambda r: 1.0 - r ** 3,
        ur_fn=lambda r: -3.0 * r ** 2,
        urr_fn=lambda r: -6.0 * r,
        radii=np.linspace(0.01, 1.0, 64),
    )
    res = check_ur1_bound(cubic, NonlinearityFlags(True, True, True, True),
                          name_suffix=",nc", expect=False)
    res.name = "nc-psi-convex"
    res.citation = CIT_CONTROL
    out.append(res)

    # cone sampled against the mismatched MEMS nonlinearity: residual O(1)
    out.append(check_residual(cone_solution(5), PowerBlowup(1.0, 2.0), 1.0,
                              ANALYTIC_TOL, "nc-residual-mismatch", expect=False))
    return out


# ---------------------------------------------------------------------------
# suite driver


@dataclass(frozen=True)
class SuiteSettings:
    suites: tuple[str, ...] = ("closed-forms", "thresholds", "identity",
                               "sweeps", "negative-controls")
    n_min: int = 2
    n_max: int = 8
    identity_p: tuple[float, ...] = (1.0, 2.0, 3.0)
    identity_m: tuple[float, ...] = (0.1, 0.3, 0.5, 0.7, 0.9)
    sweep_grid: int = 160
    workers: int = 1
    solver: SolverOptions = field(default_factory=lambda: DEFAULT_OPTIONS)

    def to_dict(self) -> dict:
        return {
            "suites": list(self.suites),
            "n_min": self.n_min,
            "n_max": self.n_max,
            "identity_p": list(self.identity_p),
            "identity_m": list(self.identity_m),
            "sweep_grid": self.sweep_grid,
            "workers": self.workers,
            "solver": self.solver.to_dict(),
        }

    def fingerprint(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


@dataclass
class TheoremReport:
    suite: str
    timestamp: str
    settings_fingerprint: str
    settings: dict
    results: list[CheckResult]

    @property
    def okay(self) -> bool:
        return all(r.passed == r.expect for r in self.results)

    def to_json_dict(self) -> dict:
        return {
            "suite": self.suite,
            "timestamp": self.timestamp,
            "settings_fingerprint": self.settings_fingerprint,
            "settings": self.settings,
            "results": [r.to_json_dict() for r in self.results],
        }


MEMS = PowerBlowup(1.0, 2.0)
P1 = PowerBlowup(1.0, 1.0)
LAMBDA_S_N2 = 4.0 / 9.0


def _suite_closed_forms() -> list[CheckResult]:
    out = []
    # analytic identity anchor and the divergent branch
    bc = bc_singular_solution(4, 0.5)
    out.append(check_identity(bc, bc.matched_spec(), 1.0))
    out.append(check_identity(cone_solution(7), cone_solution(7).matched_spec(), 1.0))
    out.append(check_identity(mems_singular_solution(3),
                              mems_singular_solution(3).normalized_spec(),
                              mems_singular_solution(3).lambda_s))
    for sol, spec, lam, tag in [
        (cone_solution(7), cone_solution(7).matched_spec(), 1.0, "cone7"),
        (cone_solution(3), cone_solution(3).matched_spec(), 1.0, "cone3"),
        (bc, bc.matched_spec(), 1.0, "bc4"),
        (mems_singular_solution(8), mems_singular_solution(8).normalized_spec(),
         mems_singular_solution(8).lambda_s, "sing8"),
    ]:
        out.append(check_residual(sol, spec, lam, ANALYTIC_TOL,
                                  f"closed-form-residual[{tag}]"))
        # f'(u(r)) r^2 must be constant and equal to kappa
        radii = np.linspace(0.01, 1.0, 100)
        u = sol.u_at(radii)
        vals = np.array([lam * spec.fprime(float(t)) for t in u]) * radii ** 2
        out.append(_identity(f"kappa-consistency[{tag}]", CIT_HARDY, sol.n,
                             {"kappa": sol.kappa},
                             float(np.abs(vals - sol.kappa).max()), 0.0, 1e-10))
        out.append(check_flux_monotonicity(sol))
        out.append(check_energy_bound(sol))
    # primitive finiteness flag against the dyadic Cauchy test
    for p, n in [(0.5, 4), (0.25, 3), (1.0, 5), (2.0, 6)]:
        sol = bc_singular_solution(n, p)
        quad = weighted_gradient_integral(sol)
        consistent = quad.divergent != sol.F1_finite
        out.append(CheckResult(
            f"primitive-finiteness[p={p:g},n={n}]", CIT_ENERGY_IDENTITY, n,
            {"p": p, "F1_finite": sol.F1_finite, "divergent": quad.divergent},
            0.0 if consistent else 1.0, 0.0, 0.0 if consistent else 1.0,
            0.0, consistent, "divergence"))
    return out


def _suite_thresholds(settings: SuiteSettings) -> list[CheckResult]:
    out = []
    n_range = range(max(2, settings.n_min), min(12, settings.n_max) + 1)
    out.extend(dimension_scan(n_range, settings.solver))
    for p in (0.25, 0.5, 1.0, 2.0, 3.0, 10.0):
        out.append(check_gamma(p))
    # exponent anchors evaluated two ways
    for n, expected in [(2, 1.0), (6, math.sqrt(5.0) - 2.0),
                        (7, math.sqrt(6.0) - 2.5)]:
        out.append(_identity(f"decay-exponent[n={n}]", CIT_DECAY, n, {},
                             decay_exponent(n), expected, 1e-12))
    return out


def _suite_identity(settings: SuiteSettings) -> list[CheckResult]:
    out = []
    opts = settings.solver
    for n in range(max(2, settings.n_min), min(6, settings.n_max) + 1):
        for p in settings.identity_p:
            spec = PowerBlowup(1.0, p)
            flags = spec.flags()
            for m in settings.identity_m:
                shot = shoot_radius(n, spec, m, opts)
                prof = shot.profile
                out.append(check_identity(prof, spec, shot.lam))
                out.append(check_flux_monotonicity(prof))
                out.append(check_energy_bound(prof))
                rep = disconjugacy_test(prof, LinearizedPotential(spec, shot.lam), opts)
                if rep.verdict is not Verdict.UNSTABLE:
                    suffix = f",p={p:g},m={m:g}"
                    out.append(check_ur1_bound(prof, flags, name_suffix=suffix))
                    res = check_decay(prof)
                    res.name = f"decay-halfannulus[n={n}{suffix}]"
                    out.append(res)
                    out.extend(check_sandwich(prof, spec, shot.lam, flags))
    return out


def _aggregate_sweep_checks(diagram, spec, label: str,
                            baseline_ratio: float | None) -> list[CheckResult]:
    """Per-record bounds over the stable branch, reported as aggregates."""
    n = diagram.n
    stable = [(rec, prof) for rec, prof in zip(diagram.records, diagram.profiles)
              if rec.stable]
    out = []
    if not stable:
        return out
    worst_ur1 = max(abs(rec.ur1) for rec, _ in stable)
    out.append(_inequality(f"sweep-ur1-bound[{label}]", CIT_UR1, n,
                           {"stable_records": len(stable)}, worst_ur1, 2.0,
                           INEQ_SLACK))
    t = np.linspace(0.02, 1.0, 50)
    pointwise = max(
        float((t * abs(rec.ur1) - np.abs(prof.ur_at(t))).max())
        for rec, prof in stable
    )
    out.append(_inequality(f"sweep-ur1-pointwise[{label}]", CIT_UR1, n,
                           {"stable_records": len(stable), "radii": 50},
                           pointwise, 0.0, INEQ_SLACK))
    lower_worst = max(0.5 * rec.ur1 ** 2 - rec.F_m for rec, _ in stable)
    out.append(_inequality(f"sweep-sandwich-lower[{label}]", CIT_SANDWICH, n,
                           {"stable_records": len(stable)}, lower_worst, 0.0,
                           INEQ_SLACK))
    ratio = max(rec.F_m / rec.ur1 ** 2 for rec, _ in stable)
    rhs = baseline_ratio * 1.05 if baseline_ratio is not None else math.inf
    out.append(_inequality(f"sweep-sandwich-ratio[{label}]", CIT_SANDWICH, n,
                           {"stable_records": len(stable),
                            "baseline": baseline_ratio}, ratio, rhs, INEQ_SLACK))
    return out


def _suite_sweeps(settings: SuiteSettings,
                  baseline: dict | None) -> list[CheckResult]:
    out = []
    opts = settings.solver
    grid = default_m_grid(settings.sweep_grid)
    base = (baseline or {}).get("max_ratio", {})

    diagram = sweep(2, MEMS, grid, opts, workers=settings.workers,
                    keep_profiles=True)
    out.append(_inequality("gelfand-lambdastar-exceeds-lambdas[n=2]",
                           CIT_GELFAND, 2,
                           {"lambda_star": diagram.lambda_star_estimate,
                            "lambda_s": LAMBDA_S_N2, "m_fold": diagram.m_fold},
                           LAMBDA_S_N2, diagram.lambda_star_estimate or math.nan,
                           0.0))
    m_fold = diagram.m_fold if diagram.m_fold is not None else math.nan
    out.append(_inequality("gelfand-fold-interior[n=2]", CIT_GELFAND, 2,
                           {"m_fold": diagram.m_fold}, m_fold, 1.0, 0.0))
    if diagram.m_fold is not None:
        _, mu1 = refine_fold(2, MEMS, diagram, opts)
        out.append(_identity("gelfand-fold-mu1[n=2]", CIT_GELFAND, 2,
                             {"m_fold": diagram.m_fold}, mu1, 0.0, 1e-3))
    out.extend(_aggregate_sweep_checks(diagram, MEMS, "n=2,mems", base.get("2")))

    if settings.n_max >= 8:
        diagram8 = sweep(8, MEMS, grid, opts, workers=settings.workers,
                         keep_profiles=True)
        sup_lam = max(rec.lam for rec in diagram8.records)
        lam_s8 = (6.0 * 8 - 8.0) / 9.0
        out.append(_identity_rel("gelfand-n8-lambda-sup", CIT_GELFAND, 8,
                                 {"sup_lambda": sup_lam, "lambda_s": lam_s8},
                                 sup_lam, lam_s8, 0.02))
        out.append(CheckResult("gelfand-n8-no-fold", CIT_GELFAND, 8,
                               {"m_fold": diagram8.m_fold},
                               0.0 if diagram8.m_fold is None else 1.0, 0.0,
                               0.0 if diagram8.m_fold is None else 1.0,
                               0.0, diagram8.m_fold is None, "divergence"))
        out.extend(_aggregate_sweep_checks(diagram8, MEMS, "n=8,mems", None))

    # small-amplitude law lam(m)/m -> 2n/f(0)
    for n in (2, 3, 4):
        if not settings.n_min <= n <= settings.n_max:
            continue
        for spec, tag in ((MEMS, "mems"), (P1, "p1")):
            shot = shoot_radius(n, spec, 1e-3, opts)
            out.append(_identity_rel(
                f"small-amplitude[{tag},n={n}]", CIT_GELFAND, n,
                {"m": 1e-3, "spec": spec_to_dict(spec)},
                shot.lam / 1e-3, 2.0 * n / spec.f(0.0), 0.01))
    return out


def run_suite(settings: SuiteSettings | None = None,
              baseline: dict | None = None) -> TheoremReport:
    """Run the selected sub-suites and assemble the deterministic report."""
    settings = settings or SuiteSettings()
    if baseline is None:
        baseline = load_baseline()
    results: list[CheckResult] = []
    if "closed-forms" in settings.suites:
        results.extend(_suite_closed_forms())
    if "thresholds" in settings.suites:
        results.extend(_suite_thresholds(settings))
    if "identity" in settings.suites:
        results.extend(_suite_identity(settings))
    if "sweeps" in settings.suites:
        results.extend(_suite_sweeps(settings, baseline))
    if "negative-controls" in settings.suites:
        results.extend(negative_controls())
    results.sort(key=lambda r: (r.name, r.n, json.dumps(r.params, sort_keys=True,
                                                        default=str)))
    return TheoremReport(
        suite="+".join(settings.suites),
        timestamp=_dt.datetime.now(_dt.timezone.utc).isoformat(),
        settings_fingerprint=settings.fingerprint(),
        settings=settings.to_dict(),
        results=results,
    )


# ---------------------------------------------------------------------------
# sandwich-ratio baseline persistence


def baseline_path():
    from importlib import resources

    return resources.files("mems_lab").joinpath("data/sandwich_baseline.json")


def load_baseline(path=None) -> dict | None:
    import pathlib

    p = pathlib.Path(path) if path is not None else baseline_path()
    try:
        with open(p, encoding="utf-8") as fh:
            return json.load(fh)
    except (FileNotFoundError, OSError):
        return None


def compute_baseline(n_range=(2, 3, 4, 5, 6), grid_size: int = 400,
                     opts: SolverOptions | None = None,
                     workers: int = 1) -> dict:
    """Per-dimension max of lam F(m) / u_r(1)^2 over the standard sweeps.

    This is the empirical stand-in for the existential sandwich constant,
    maximized over the MEMS and p = 1 families on the stable branch.
    """
    opts = opts or DEFAULT_OPTIONS
    grid = default_m_grid(grid_size)
    max_ratio = {}
    for n in n_range:
        worst = 0.0
        for spec in (MEMS, P1):
            diagram = sweep(n, spec, grid, opts, workers=workers)
            worst = max(worst, max(rec.F_m / rec.ur1 ** 2
                                   for rec in diagram.records if rec.stable))
        max_ratio[str(n)] = worst
    return {
        "version": 1,
        "description": "max stable-branch ratio lam*F(m)/ur1^2 per dimension,"
                       " over the MEMS and p=1 power families",
        "grid_size": grid_size,
        "families": ["power:1:2", "power:1:1"],
        "max_ratio": max_ratio,
    }


def save_baseline(data: dict, path=None) -> None:
    import pathlib

    p = pathlib.Path(path) if path is not None else pathlib.Path(str(baseline_path()))
    p.parent.mkdir(parents=True, exist_ok=True)
    with open(p, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=2)
        fh.write("\n")

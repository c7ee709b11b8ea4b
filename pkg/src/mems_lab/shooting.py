"""Gelfand shooting map, bifurcation sweeps and the minimal branch.

Free shooting plus radius rescaling: if v solves -Delta v = f(v) with
v(0) = m and v(R) = 0, then u(x) = v(R|x|) solves -Delta u = lam f(u) on
the unit ball with lam = R^2.  One initial value solve per center value,
no boundary-value iteration; the pull-in threshold lambda* emerges as the
maximum of lam over the stable branch.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import EmptyDiagram, IntegrationError, NoZeroCrossing, NotBracketed
from .nonlinearity import Nonlinearity, spec_to_dict
from .radial_ode import (
    DEFAULT_OPTIONS,
    RadialProfile,
    ShootStatus,
    SolverOptions,
    integrate,
)
from .stability import (
    LinearizedPotential,
    Verdict,
    disconjugacy_test,
    principal_eigenvalue,
)

LAMBDA_MATCH_TOL = 1e-10


class ShotSolution(NamedTuple):
    R: float
    lam: float
    profile: RadialProfile


@dataclass(frozen=True)
class BifurcationRecord:
    """One point of the diagram: center value m and its unit-ball solution data."""

    m: float
    lam: float
    ur1: float
    F_m: float
    stable: bool
    mu1: float


@dataclass
class BifurcationDiagram:
    spec: Nonlinearity
    n: int
    records: list[BifurcationRecord]
    lambda_star_estimate: float | None = None
    m_fold: float | None = None
    diagnostics: dict = field(default_factory=dict)
    profiles: list[RadialProfile] | None = None


def _rescale_to_unit_ball(profile: RadialProfile, R: float) -> RadialProfile:
    """Map v on [0, R] to u(s) = v(Rs) on [0, 1]; u_r scales by R, lam = R^2."""
    r = profile.r_nodes / R
    r[-1] = 1.0
    y = profile.y_nodes.copy()
    y[:, 1] *= R
    dense = profile.dense.copy()
    dense[:, 0, :] *= R
    dense[:, 1, :] *= R * R
    return RadialProfile(
        n=profile.n,
        m=profile.m,
        r_nodes=r,
        y_nodes=y,
        h_seg=profile.h_seg / R,
        dense=dense,
        r0=profile.r0 / R,
        g_center=profile.g_center * R * R,
        lam=R * R,
    )


def shoot_radius(n: int, spec: Nonlinearity, m: float,
                 opts: SolverOptions | None = None) -> ShotSolution:
    """Free-shoot from m, rescale the zero radius onto the unit ball.

    Returns (R, lam = R^2, unit-ball profile with u(1) = 0 within 1e-10).
    """
    if not 0.0 < m < 1.0:
        raise NoZeroCrossing(f"center value m={m!r} must lie in (0, 1)")
    result = integrate(n, spec, m, opts)
    if result.status is not ShootStatus.HIT_ZERO:
        raise NoZeroCrossing(
            f"free shooting ended {result.status.value} at r={result.profile.r_end}"
            f" (n={n}, m={m})"
        )
    R = result.profile.r_end
    return ShotSolution(R, R * R, _rescale_to_unit_ball(result.profile, R))


def default_m_grid(count: int = 400, m_min: float = 1e-3,
                   m_max: float = 1.0 - 1e-4) -> np.ndarray:
    """Grid logarithmically clustered at both ends (near 0 and near 1)."""
    k = count // 2
    left = np.geomspace(m_min, 0.5, k, endpoint=False)
    right = 1.0 - np.geomspace(0.5, 1.0 - m_max, count - k)
    return np.concatenate([left, right])


def _sweep_task(args):
    n, spec, m, opts = args
    try:
        _, lam, profile = shoot_radius(n, spec, m, opts)
    except (NoZeroCrossing, IntegrationError) as exc:
        return m, None, None, str(exc)
    pot = LinearizedPotential(spec, lam)
    disc = disconjugacy_test(profile, pot, opts)
    eig = principal_eigenvalue(profile, pot, opts)
    record = BifurcationRecord(
        m=m,
        lam=lam,
        ur1=profile.ur1,
        F_m=lam * spec.F(m),
        stable=disc.verdict is not Verdict.UNSTABLE,
        mu1=eig.mu1,
    )
    return m, record, profile, None


def sweep(n: int, spec: Nonlinearity, m_grid, opts: SolverOptions | None = None,
          workers: int = 1, keep_profiles: bool = False) -> BifurcationDiagram:
    """One record per center value that shoots to a unit-ball solution.

    Data-parallel over m; the merged diagram is ordered by m and identical
    for any worker count.  Center values that fail to shoot are collected
    in diagnostics rather than raised.
    """
    m_grid = np.asarray(m_grid, dtype=np.float64)
    if not (np.diff(m_grid) > 0).all():
        raise ValueError("m_grid must be strictly increasing")
    opts = opts or DEFAULT_OPTIONS
    tasks = [(n, spec, float(m), opts) for m in m_grid]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_sweep_task, tasks,
                                     chunksize=max(1, len(tasks) // (8 * workers))))
    else:
        outcomes = [_sweep_task(t) for t in tasks]

    records = []
    profiles = []
    failed = []
    for m, record, profile, err in outcomes:
        if record is None:
            failed.append({"m": m, "error": err})
        else:
            records.append(record)
            profiles.append(profile)
    if not records:
        raise EmptyDiagram(f"no center value in the grid shoots for n={n}")

    jumps = []
    for a, b in zip(records[:-1], records[1:]):
        dm = b.m - a.m
        rel = abs(b.lam - a.lam) / max(a.lam, 1e-300)
        if rel > 10.0 * dm / a.m:
            jumps.append({"m": a.m, "rel_jump": rel, "bound": 10.0 * dm / a.m})

    diagram = BifurcationDiagram(
        spec=spec,
        n=n,
        records=records,
        diagnostics={
            "failed_m": failed,
            "grid_size": int(len(m_grid)),
            "solver": opts.to_dict(),
            "spec": spec_to_dict(spec),
            "lambda_jumps": jumps,
        },
        profiles=profiles if keep_profiles else None,
    )
    diagram.lambda_star_estimate, diagram.m_fold = estimate_lambda_star(diagram)
    stable_lams = [r.lam for r in records if r.stable]
    if stable_lams and diagram.lambda_star_estimate is not None:
        last_stable = max(r.m for r in records if r.stable)
        diagram.diagnostics["lambda_star_gap"] = (
            diagram.lambda_star_estimate
            - next(r.lam for r in reversed(records) if r.stable and r.m == last_stable)
        )
    return diagram


def estimate_lambda_star(diagram: BifurcationDiagram):
    """(max lam over stable records, fold center value or None).

    The fold is reported only when the argmax is interior with three-point
    confirmation (both neighboring records carry smaller lam); a maximum
    sitting at the grid's m -> 1 end means no fold was crossed.
    """
    records = diagram.records
    if not records:
        raise EmptyDiagram("diagram has no records")
    stable_idx = [i for i, rec in enumerate(records) if rec.stable]
    if not stable_idx:
        return None, None
    best = max(stable_idx, key=lambda i: records[i].lam)
    lam_star = records[best].lam
    if best == len(records) - 1 or best == 0:
        return lam_star, None
    if records[best - 1].lam < lam_star and records[best + 1].lam < lam_star:
        return lam_star, records[best].m
    return lam_star, None


def refine_fold(n: int, spec: Nonlinearity, diagram: BifurcationDiagram,
                opts: SolverOptions | None = None, m_tol: float = 1e-12):
    """Bisect the stability flip around the discrete fold.

    Returns (m_fold, mu1 at the fold); |mu1| is tiny since the principal
    eigenvalue crosses zero exactly at the turning point.
    """
    opts = opts or DEFAULT_OPTIONS
    if diagram.m_fold is None:
        raise NotBracketed("diagram has no interior fold to refine")
    records = diagram.records
    i = next(idx for idx, rec in enumerate(records) if rec.m == diagram.m_fold)
    try:
        m_hi = next(rec.m for rec in records[i + 1:] if not rec.stable)
    except StopIteration:
        raise NotBracketed("no unstable record beyond the fold") from None
    m_lo = diagram.m_fold

    def unstable(m: float) -> bool:
        _, lam, profile = shoot_radius(n, spec, m, opts)
        rep = disconjugacy_test(profile, LinearizedPotential(spec, lam), opts)
        return rep.verdict is Verdict.UNSTABLE

    while m_hi - m_lo > m_tol:
        mid = 0.5 * (m_lo + m_hi)
        if mid == m_lo or mid == m_hi:
            break
        if unstable(mid):
            m_hi = mid
        else:
            m_lo = mid
    m_star = 0.5 * (m_lo + m_hi)
    _, lam, profile = shoot_radius(n, spec, m_star, opts)
    eig = principal_eigenvalue(profile, LinearizedPotential(spec, lam), opts)
    return m_star, eig.mu1


def minimal_branch_at(n: int, spec: Nonlinearity, lam: float,
                      diagram: BifurcationDiagram,
                      opts: SolverOptions | None = None) -> RadialProfile:
    """Solution on the minimal branch with the requested lambda.

    Bisection of lam(m) - lam on the sub-fold branch, where lam(m) is
    strictly increasing; the returned profile is the unit-ball solution.
    """
    opts = opts or DEFAULT_OPTIONS
    lam_star = diagram.lambda_star_estimate
    if lam_star is None:
        raise EmptyDiagram("diagram has no stable records")
    if not 0.0 < lam < lam_star:
        raise NotBracketed(f"lambda={lam} outside the minimal branch (0, {lam_star})")
    if diagram.m_fold is not None:
        branch = [r for r in diagram.records if r.stable and r.m <= diagram.m_fold]
    else:
        branch = [r for r in diagram.records if r.stable]

    m_lo = None
    m_hi = None
    for rec in branch:
        if rec.lam >= lam:
            m_hi = rec.m
            break
        m_lo = rec.m
    if m_hi is None:
        m_hi = branch[-1].m if branch else None
    if m_hi is None:
        raise NotBracketed("no stable branch records to bracket with")
    if m_lo is None:
        # below the first grid point: seed from the small-amplitude law
        # lam(m) ~ 2 n m / f(0) and back off until the sign is confirmed
        m_lo = lam * spec.f(0.0) / (2.0 * n) / 4.0
        for _ in range(80):
            shot = shoot_radius(n, spec, m_lo, opts)
            if shot.lam < lam:
                break
            m_lo *= 0.25
        else:
            raise NotBracketed(f"could not bracket lambda={lam} near m=0")

    profile = None
    for _ in range(200):
        mid = 0.5 * (m_lo + m_hi)
        if mid == m_lo or mid == m_hi:
            break
        shot = shoot_radius(n, spec, mid, opts)
        profile = shot.profile
        if abs(shot.lam - lam) <= LAMBDA_MATCH_TOL * max(1.0, lam):
            return profile
        if shot.lam < lam:
            m_lo = mid
        else:
            m_hi = mid
    if profile is None:
        profile = shoot_radius(n, spec, 0.5 * (m_lo + m_hi), opts).profile
    return profile

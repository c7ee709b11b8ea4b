"""Pure-Python integration kernels (fallback backend).

This module mirrors the compiled extension ``mems_lab._core`` operation for
operation: same Dormand-Prince 5(4) tableau, same quartic dense-output
interpolant, same step controller and event logic, written so that both
backends evaluate the identical sequence of double-precision operations.
The compiled core exists because sweeps run hundreds of thousands of
integrations; this module exists so the package works without a compiler.

Kernel-level status codes (shared with the extension):

    shoot:        0 hit zero   1 blew up   2 max radius
                  3 step underflow   4 step limit
    phi shooting: 0 zero found   1 no zero up to r_end
                  2 no zero (monotone-potential certificate)
                  3 step underflow   4 step limit

Everything here works on plain floats and numpy arrays; interpretation
(exceptions, dataclasses, rescaling) lives in ``mems_lab.radial_ode``.
"""

from __future__ import annotations

import math

import numpy as np

# Dormand-Prince 5(4) pair, exact tableau rationals rounded once to binary64.
C2 = 0.2
C3 = 0.3
C4 = 0.8
C5 = 0.8888888888888888
A21 = 0.2
A31 = 0.075
A32 = 0.225
A41 = 0.9777777777777777
A42 = -3.7333333333333334
A43 = 3.5555555555555554
A51 = 2.9525986892242035
A52 = -11.595793324188385
A53 = 9.822892851699436
A54 = -0.2908093278463649
A61 = 2.8462752525252526
A62 = -10.757575757575758
A63 = 8.906422717743473
A64 = 0.2784090909090909
A65 = -0.2735313036020583
B1 = 0.09114583333333333
B3 = 0.44923629829290207
B4 = 0.6510416666666666
B5 = -0.322376179245283
B6 = 0.13095238095238096
E1 = -0.0012326388888888888
E3 = 0.0042527702905061394
E4 = -0.03697916666666667
E5 = 0.05086379716981132
E6 = -0.0419047619047619
E7 = 0.025
# Quartic dense-output coefficients (Shampine interpolant); column j is the
# theta^(j+1) coefficient contributed by stage i.  Row 2 is zero.
P12 = -2.8535800653862835
P13 = 3.0717434641059005
P14 = -1.1270175653862835
P32 = 4.023133379230305
P33 = -6.249321565289
P34 = 2.675424484351598
P42 = -3.7324019615885042
P43 = 10.068970589843675
P44 = -5.685526961588504
P52 = 2.5548038301849423
P53 = -6.399112377351017
P54 = 3.5219323679207912
P62 = -1.3744241142186024
P63 = 3.272657752246729
P64 = -1.7672812570757455
P72 = 1.3824689317781436
P73 = -3.764937863556287
P74 = 2.382468931778144

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 10.0
H_MIN = 1e-15
INIT_STEP_MULT = 100.0
BLOW_NEAR = 1e-3
BISECT_ITERS = 60
U_POLISH_TOL = 1e-13
PHI_RENORM = 1e100

STATUS_HIT_ZERO = 0
STATUS_BLEW_UP = 1
STATUS_MAX_RADIUS = 2
STATUS_STEP_UNDERFLOW = 3
STATUS_STEP_LIMIT = 4

PHI_ZERO_FOUND = 0
PHI_NO_ZERO_END = 1
PHI_NO_ZERO_CERT = 2

KIND_CONST = 0
KIND_POWER = 1

POT_CONST = 0
POT_POWER = 1


def _g(kind, ga, gp, glam, u):
    """Right-hand side nonlinearity g(u)."""
    if kind == KIND_CONST:
        return glam * ga
    return glam * ga * (1.0 - u) ** (-gp)


def shoot(kind, ga, gp, glam, n, m, r0, rtol, atol, eps_blow, r_max, max_steps):
    """Integrate u'' + ((n-1)/r) u' + g(u) = 0 from the series start at r0.

    Returns (status, r_nodes, y_nodes, h_seg, qd) where qd[i, c, j] is the
    theta^(j+1) dense coefficient of component c on segment i, valid on
    [r_nodes[i], r_nodes[i] + h_seg[i]].
    """
    nm1 = n - 1.0
    g0 = _g(kind, ga, gp, glam, m)
    r = r0
    u = m - g0 * r0 * r0 / (2.0 * n)
    w = -g0 * r0 / n

    rs = [r]
    us = [u]
    ws = [w]
    hs = []
    qs = []

    status = -1
    if 1.0 - u < eps_blow:
        status = STATUS_BLEW_UP
    elif u <= 0.0:
        # center value at (or numerically below) zero: the series start is
        # already past the crossing
        status = STATUS_HIT_ZERO

    if status < 0:
        k1u = w
        k1w = -nm1 / r * w - _g(kind, ga, gp, glam, u)
        h = INIT_STEP_MULT * r0
        steps = 0
        while True:
            steps += 1
            if steps > max_steps:
                status = STATUS_STEP_LIMIT
                break
            at_stop = False
            if r + h >= r_max:
                h = r_max - r
                at_stop = True
            if 1.0 - u < BLOW_NEAR:
                cap = 0.01 * (1.0 - u) / max(abs(w), 1e-30)
                if h > cap:
                    h = cap
                    at_stop = False
            if h < H_MIN:
                status = STATUS_STEP_UNDERFLOW
                break

            tu = u + h * (A21 * k1u)
            tw = w + h * (A21 * k1w)
            k2u = tw
            k2w = -nm1 / (r + C2 * h) * tw - _g(kind, ga, gp, glam, tu)
            tu = u + h * (A31 * k1u + A32 * k2u)
            tw = w + h * (A31 * k1w + A32 * k2w)
            k3u = tw
            k3w = -nm1 / (r + C3 * h) * tw - _g(kind, ga, gp, glam, tu)
            tu = u + h * (A41 * k1u + A42 * k2u + A43 * k3u)
            tw = w + h * (A41 * k1w + A42 * k2w + A43 * k3w)
            k4u = tw
            k4w = -nm1 / (r + C4 * h) * tw - _g(kind, ga, gp, glam, tu)
            tu = u + h * (A51 * k1u + A52 * k2u + A53 * k3u + A54 * k4u)
            tw = w + h * (A51 * k1w + A52 * k2w + A53 * k3w + A54 * k4w)
            k5u = tw
            k5w = -nm1 / (r + C5 * h) * tw - _g(kind, ga, gp, glam, tu)
            tu = u + h * (A61 * k1u + A62 * k2u + A63 * k3u + A64 * k4u + A65 * k5u)
            tw = w + h * (A61 * k1w + A62 * k2w + A63 * k3w + A64 * k4w + A65 * k5w)
            k6u = tw
            k6w = -nm1 / (r + h) * tw - _g(kind, ga, gp, glam, tu)

            unew = u + h * (B1 * k1u + B3 * k3u + B4 * k4u + B5 * k5u + B6 * k6u)
            wnew = w + h * (B1 * k1w + B3 * k3w + B4 * k4w + B5 * k5w + B6 * k6w)
            rnew = r_max if at_stop else r + h
            k7u = wnew
            k7w = -nm1 / rnew * wnew - _g(kind, ga, gp, glam, unew)

            eu = h * (E1 * k1u + E3 * k3u + E4 * k4u + E5 * k5u + E6 * k6u + E7 * k7u)
            ew = h * (E1 * k1w + E3 * k3w + E4 * k4w + E5 * k5w + E6 * k6w + E7 * k7w)
            su = atol + rtol * max(abs(u), abs(unew))
            sw = atol + rtol * max(abs(w), abs(wnew))
            err = math.sqrt(0.5 * ((eu / su) * (eu / su) + (ew / sw) * (ew / sw)))

            if err > 1.0:
                h = h * max(MIN_FACTOR, SAFETY * err ** -0.2)
                continue

            qu0 = k1u
            qu1 = k1u * P12 + k3u * P32 + k4u * P42 + k5u * P52 + k6u * P62 + k7u * P72
            qu2 = k1u * P13 + k3u * P33 + k4u * P43 + k5u * P53 + k6u * P63 + k7u * P73
            qu3 = k1u * P14 + k3u * P34 + k4u * P44 + k5u * P54 + k6u * P64 + k7u * P74
            qw0 = k1w
            qw1 = k1w * P12 + k3w * P32 + k4w * P42 + k5w * P52 + k6w * P62 + k7w * P72
            qw2 = k1w * P13 + k3w * P33 + k4w * P43 + k5w * P53 + k6w * P63 + k7w * P73
            qw3 = k1w * P14 + k3w * P34 + k4w * P44 + k5w * P54 + k6w * P64 + k7w * P74

            if unew <= 0.0:
                # polish the crossing on the dense quartic
                lo = 0.0
                hi = 1.0
                th = 1.0
                uv = unew
                for _ in range(BISECT_ITERS):
                    if abs(uv) <= U_POLISH_TOL:
                        break
                    mid = 0.5 * (lo + hi)
                    uv_mid = u + h * mid * (qu0 + mid * (qu1 + mid * (qu2 + mid * qu3)))
                    if uv_mid <= 0.0:
                        hi = mid
                        th = mid
                        uv = uv_mid
                    else:
                        lo = mid
                R = r + th * h
                uR = u + h * th * (qu0 + th * (qu1 + th * (qu2 + th * qu3)))
                wR = w + h * th * (qw0 + th * (qw1 + th * (qw2 + th * qw3)))
                rs.append(R)
                us.append(uR)
                ws.append(wR)
                hs.append(h)
                qs.append((qu0, qu1, qu2, qu3, qw0, qw1, qw2, qw3))
                status = STATUS_HIT_ZERO
                break

            rs.append(rnew)
            us.append(unew)
            ws.append(wnew)
            hs.append(h)
            qs.append((qu0, qu1, qu2, qu3, qw0, qw1, qw2, qw3))

            if 1.0 - unew < eps_blow:
                status = STATUS_BLEW_UP
                break
            if at_stop:
                status = STATUS_MAX_RADIUS
                break

            if err == 0.0:
                h = h * MAX_FACTOR
            else:
                h = h * min(MAX_FACTOR, SAFETY * err ** -0.2)
            r = rnew
            u = unew
            w = wnew
            k1u = k7u
            k1w = k7w

    r_nodes = np.array(rs, dtype=np.float64)
    y_nodes = np.empty((len(rs), 2), dtype=np.float64)
    y_nodes[:, 0] = us
    y_nodes[:, 1] = ws
    h_seg = np.array(hs, dtype=np.float64)
    qd = np.array(qs, dtype=np.float64).reshape(len(hs), 2, 4)
    return status, r_nodes, y_nodes, h_seg, qd


def shoot_callable(gfun, n, m, r0, rtol, atol, eps_blow, r_max, max_steps):
    """As `shoot` but with an arbitrary Python nonlinearity u -> g(u).

    Only available on the pure backend; user-supplied families route here.
    """
    nm1 = n - 1.0
    g0 = gfun(m)
    r = r0
    u = m - g0 * r0 * r0 / (2.0 * n)
    w = -g0 * r0 / n

    rs = [r]
    us = [u]
    ws = [w]
    hs = []
    qs = []

    status = -1
    if 1.0 - u < eps_blow:
        status = STATUS_BLEW_UP
    elif u <= 0.0:
        status = STATUS_HIT_ZERO

    if status < 0:
        k1u = w
        k1w = -nm1 / r * w - gfun(u)
        h = INIT_STEP_MULT * r0
        steps = 0
        while True:
            steps += 1
            if steps > max_steps:
                status = STATUS_STEP_LIMIT
                break
            at_stop = False
            if r + h >= r_max:
                h = r_max - r
                at_stop = True
            if 1.0 - u < BLOW_NEAR:
                cap = 0.01 * (1.0 - u) / max(abs(w), 1e-30)
                if h > cap:
                    h = cap
                    at_stop = False
            if h < H_MIN:
                status = STATUS_STEP_UNDERFLOW
                break

            tu = u + h * (A21 * k1u)
            tw = w + h * (A21 * k1w)
            k2u = tw
            k2w = -nm1 / (r + C2 * h) * tw - gfun(tu)
            tu = u + h * (A31 * k1u + A32 * k2u)
            tw = w + h * (A31 * k1w + A32 * k2w)
            k3u = tw
            k3w = -nm1 / (r + C3 * h) * tw - gfun(tu)
            tu = u + h * (A41 * k1u + A42 * k2u + A43 * k3u)
            tw = w + h * (A41 * k1w + A42 * k2w + A43 * k3w)
            k4u = tw
            k4w = -nm1 / (r + C4 * h) * tw - gfun(tu)
            tu = u + h * (A51 * k1u + A52 * k2u + A53 * k3u + A54 * k4u)
            tw = w + h * (A51 * k1w + A52 * k2w + A53 * k3w + A54 * k4w)
            k5u = tw
            k5w = -nm1 / (r + C5 * h) * tw - gfun(tu)
            tu = u + h * (A61 * k1u + A62 * k2u + A63 * k3u + A64 * k4u + A65 * k5u)
            tw = w + h * (A61 * k1w + A62 * k2w + A63 * k3w + A64 * k4w + A65 * k5w)
            k6u = tw
            k6w = -nm1 / (r + h) * tw - gfun(tu)

            unew = u + h * (B1 * k1u + B3 * k3u + B4 * k4u + B5 * k5u + B6 * k6u)
            wnew = w + h * (B1 * k1w + B3 * k3w + B4 * k4w + B5 * k5w + B6 * k6w)
            rnew = r_max if at_stop else r + h
            k7u = wnew
            k7w = -nm1 / rnew * wnew - gfun(unew)

            eu = h * (E1 * k1u + E3 * k3u + E4 * k4u + E5 * k5u + E6 * k6u + E7 * k7u)
            ew = h * (E1 * k1w + E3 * k3w + E4 * k4w + E5 * k5w + E6 * k6w + E7 * k7w)
            su = atol + rtol * max(abs(u), abs(unew))
            sw = atol + rtol * max(abs(w), abs(wnew))
            err = math.sqrt(0.5 * ((eu / su) * (eu / su) + (ew / sw) * (ew / sw)))

            if err > 1.0:
                h = h * max(MIN_FACTOR, SAFETY * err ** -0.2)
                continue

            qu0 = k1u
            qu1 = k1u * P12 + k3u * P32 + k4u * P42 + k5u * P52 + k6u * P62 + k7u * P72
            qu2 = k1u * P13 + k3u * P33 + k4u * P43 + k5u * P53 + k6u * P63 + k7u * P73
            qu3 = k1u * P14 + k3u * P34 + k4u * P44 + k5u * P54 + k6u * P64 + k7u * P74
            qw0 = k1w
            qw1 = k1w * P12 + k3w * P32 + k4w * P42 + k5w * P52 + k6w * P62 + k7w * P72
            qw2 = k1w * P13 + k3w * P33 + k4w * P43 + k5w * P53 + k6w * P63 + k7w * P73
            qw3 = k1w * P14 + k3w * P34 + k4w * P44 + k5w * P54 + k6w * P64 + k7w * P74

            if unew <= 0.0:
                lo = 0.0
                hi = 1.0
                th = 1.0
                uv = unew
                for _ in range(BISECT_ITERS):
                    if abs(uv) <= U_POLISH_TOL:
                        break
                    mid = 0.5 * (lo + hi)
                    uv_mid = u + h * mid * (qu0 + mid * (qu1 + mid * (qu2 + mid * qu3)))
                    if uv_mid <= 0.0:
                        hi = mid
                        th = mid
                        uv = uv_mid
                    else:
                        lo = mid
                R = r + th * h
                uR = u + h * th * (qu0 + th * (qu1 + th * (qu2 + th * qu3)))
                wR = w + h * th * (qw0 + th * (qw1 + th * (qw2 + th * qw3)))
                rs.append(R)
                us.append(uR)
                ws.append(wR)
                hs.append(h)
                qs.append((qu0, qu1, qu2, qu3, qw0, qw1, qw2, qw3))
                status = STATUS_HIT_ZERO
                break

            rs.append(rnew)
            us.append(unew)
            ws.append(wnew)
            hs.append(h)
            qs.append((qu0, qu1, qu2, qu3, qw0, qw1, qw2, qw3))

            if 1.0 - unew < eps_blow:
                status = STATUS_BLEW_UP
                break
            if at_stop:
                status = STATUS_MAX_RADIUS
                break

            if err == 0.0:
                h = h * MAX_FACTOR
            else:
                h = h * min(MAX_FACTOR, SAFETY * err ** -0.2)
            r = rnew
            u = unew
            w = wnew
            k1u = k7u
            k1w = k7w

    r_nodes = np.array(rs, dtype=np.float64)
    y_nodes = np.empty((len(rs), 2), dtype=np.float64)
    y_nodes[:, 0] = us
    y_nodes[:, 1] = ws
    h_seg = np.array(hs, dtype=np.float64)
    qd = np.array(qs, dtype=np.float64).reshape(len(hs), 2, 4)
    return status, r_nodes, y_nodes, h_seg, qd


class _ProfileCursor:
    """Scalar dense-output evaluator with a forward-moving segment cursor."""

    def __init__(self, n, m, g_center, prof_r0, r_nodes, y_nodes, h_seg, qd):
        self.n = n
        self.m = m
        self.gc = g_center
        self.r0 = prof_r0
        self.r = r_nodes
        self.y = y_nodes
        self.h = h_seg
        self.q = qd
        self.nseg = len(h_seg)
        self.i = 0

    def u_at(self, r):
        if r <= self.r0 or self.nseg == 0:
            return self.m - self.gc * r * r / (2.0 * self.n)
        last = self.r[self.nseg]
        if r > last:
            r = last
        i = self.i
        while i + 1 < self.nseg and self.r[i + 1] < r:
            i += 1
        while i > 0 and self.r[i] > r:
            i -= 1
        self.i = i
        th = (r - self.r[i]) / self.h[i]
        q = self.q[i]
        return self.y[i, 0] + self.h[i] * th * (
            q[0, 0] + th * (q[0, 1] + th * (q[0, 2] + th * q[0, 3]))
        )


def phi_first_zero(pot_kind, pa, pp, plam, mu, n, m, g_center, prof_r0,
                   r_nodes, y_nodes, h_seg, qd, r0, r_end, rtol, atol,
                   max_steps, monotone_ok, scale=1.0):
    """First zero of the linearized solution phi on (r0, r_end].

    phi'' + ((n-1)/r) phi' + (q(r) + mu) phi = 0, phi regular at the center,
    normalized to ``scale`` times the quadratic series at r0 (zeros are
    invariant under the normalization; negative scales are folded to their
    absolute value).  Potentials:

        pot_kind 0: q = pa                      (constant)
        pot_kind 1: q = plam*pa*pp*(1-u(r))^(-pp-1)  along the dense profile

    When ``monotone_ok`` (q nonincreasing in r) the integration stops early
    once phi > 0, phi' >= 0 and q + mu <= 0: the flux (r^{n-1} phi')' =
    -r^{n-1}(q+mu) phi >= 0 keeps phi increasing, so no zero can occur ahead.
    Returns (code, radius).
    """
    nm1 = n - 1.0
    cursor = _ProfileCursor(n, m, g_center, prof_r0, r_nodes, y_nodes, h_seg, qd)

    def q_at(rr):
        if pot_kind == POT_CONST:
            return pa + mu
        uu = cursor.u_at(rr)
        return plam * pa * pp * (1.0 - uu) ** (-pp - 1.0) + mu

    q0 = (pa + mu) if pot_kind == POT_CONST \
        else plam * pa * pp * (1.0 - m) ** (-pp - 1.0) + mu
    sc = abs(scale)
    r = r0
    u = sc * (1.0 - q0 * r0 * r0 / (2.0 * n))
    w = sc * (-q0 * r0 / n)
    if u <= 0.0:
        return PHI_ZERO_FOUND, r0
    if monotone_ok and w >= 0.0 and q0 <= 0.0:
        return PHI_NO_ZERO_CERT, r0

    k1u = w
    k1w = -nm1 / r * w - q_at(r) * u
    h = INIT_STEP_MULT * r0
    steps = 0
    while True:
        steps += 1
        if steps > max_steps:
            return STATUS_STEP_LIMIT, r
        at_stop = False
        if r + h >= r_end:
            h = r_end - r
            at_stop = True
        if h < H_MIN:
            return STATUS_STEP_UNDERFLOW, r

        tu = u + h * (A21 * k1u)
        tw = w + h * (A21 * k1w)
        k2u = tw
        k2w = -nm1 / (r + C2 * h) * tw - q_at(r + C2 * h) * tu
        tu = u + h * (A31 * k1u + A32 * k2u)
        tw = w + h * (A31 * k1w + A32 * k2w)
        k3u = tw
        k3w = -nm1 / (r + C3 * h) * tw - q_at(r + C3 * h) * tu
        tu = u + h * (A41 * k1u + A42 * k2u + A43 * k3u)
        tw = w + h * (A41 * k1w + A42 * k2w + A43 * k3w)
        k4u = tw
        k4w = -nm1 / (r + C4 * h) * tw - q_at(r + C4 * h) * tu
        tu = u + h * (A51 * k1u + A52 * k2u + A53 * k3u + A54 * k4u)
        tw = w + h * (A51 * k1w + A52 * k2w + A53 * k3w + A54 * k4w)
        k5u = tw
        k5w = -nm1 / (r + C5 * h) * tw - q_at(r + C5 * h) * tu
        tu = u + h * (A61 * k1u + A62 * k2u + A63 * k3u + A64 * k4u + A65 * k5u)
        tw = w + h * (A61 * k1w + A62 * k2w + A63 * k3w + A64 * k4w + A65 * k5w)
        k6u = tw
        k6w = -nm1 / (r + h) * tw - q_at(r + h) * tu

        unew = u + h * (B1 * k1u + B3 * k3u + B4 * k4u + B5 * k5u + B6 * k6u)
        wnew = w + h * (B1 * k1w + B3 * k3w + B4 * k4w + B5 * k5w + B6 * k6w)
        rnew = r_end if at_stop else r + h
        qnew = q_at(rnew)
        k7u = wnew
        k7w = -nm1 / rnew * wnew - qnew * unew

        eu = h * (E1 * k1u + E3 * k3u + E4 * k4u + E5 * k5u + E6 * k6u + E7 * k7u)
        ew = h * (E1 * k1w + E3 * k3w + E4 * k4w + E5 * k5w + E6 * k6w + E7 * k7w)
        su = atol + rtol * max(abs(u), abs(unew))
        sw = atol + rtol * max(abs(w), abs(wnew))
        err = math.sqrt(0.5 * ((eu / su) * (eu / su) + (ew / sw) * (ew / sw)))

        if err > 1.0:
            h = h * max(MIN_FACTOR, SAFETY * err ** -0.2)
            continue

        if unew <= 0.0:
            qu0 = k1u
            qu1 = k1u * P12 + k3u * P32 + k4u * P42 + k5u * P52 + k6u * P62 + k7u * P72
            qu2 = k1u * P13 + k3u * P33 + k4u * P43 + k5u * P53 + k6u * P63 + k7u * P73
            qu3 = k1u * P14 + k3u * P34 + k4u * P44 + k5u * P54 + k6u * P64 + k7u * P74
            lo = 0.0
            hi = 1.0
            th = 1.0
            uv = unew
            for _ in range(BISECT_ITERS):
                if abs(uv) <= U_POLISH_TOL:
                    break
                mid = 0.5 * (lo + hi)
                uv_mid = u + h * mid * (qu0 + mid * (qu1 + mid * (qu2 + mid * qu3)))
                if uv_mid <= 0.0:
                    hi = mid
                    th = mid
                    uv = uv_mid
                else:
                    lo = mid
            return PHI_ZERO_FOUND, r + th * h

        if at_stop:
            return PHI_NO_ZERO_END, rnew
        if monotone_ok and wnew >= 0.0 and qnew <= 0.0:
            return PHI_NO_ZERO_CERT, rnew

        if err == 0.0:
            h = h * MAX_FACTOR
        else:
            h = h * min(MAX_FACTOR, SAFETY * err ** -0.2)
        r = rnew
        u = unew
        w = wnew
        k1u = k7u
        k1w = k7w
        if abs(u) > PHI_RENORM:
            u = u * 1e-100
            w = w * 1e-100
            k1u = k1u * 1e-100
            k1w = k1w * 1e-100


def phi_first_zero_callable(qfun, mu, n, r0, r_end, rtol, atol, max_steps,
                            scale=1.0):
    """As `phi_first_zero` with q(r) an arbitrary callable (pure backend only).

    No early certificate is applied since monotonicity of q is unknown.
    """
    nm1 = n - 1.0

    def q_at(rr):
        return qfun(rr) + mu

    q0 = q_at(r0)
    sc = abs(scale)
    r = r0
    u = sc * (1.0 - q0 * r0 * r0 / (2.0 * n))
    w = sc * (-q0 * r0 / n)
    if u <= 0.0:
        return PHI_ZERO_FOUND, r0

    k1u = w
    k1w = -nm1 / r * w - q0 * u
    h = INIT_STEP_MULT * r0
    steps = 0
    while True:
        steps += 1
        if steps > max_steps:
            return STATUS_STEP_LIMIT, r
        at_stop = False
        if r + h >= r_end:
            h = r_end - r
            at_stop = True
        if h < H_MIN:
            return STATUS_STEP_UNDERFLOW, r

        tu = u + h * (A21 * k1u)
        tw = w + h * (A21 * k1w)
        k2u = tw
        k2w = -nm1 / (r + C2 * h) * tw - q_at(r + C2 * h) * tu
        tu = u + h * (A31 * k1u + A32 * k2u)
        tw = w + h * (A31 * k1w + A32 * k2w)
        k3u = tw
        k3w = -nm1 / (r + C3 * h) * tw - q_at(r + C3 * h) * tu
        tu = u + h * (A41 * k1u + A42 * k2u + A43 * k3u)
        tw = w + h * (A41 * k1w + A42 * k2w + A43 * k3w)
        k4u = tw
        k4w = -nm1 / (r + C4 * h) * tw - q_at(r + C4 * h) * tu
        tu = u + h * (A51 * k1u + A52 * k2u + A53 * k3u + A54 * k4u)
        tw = w + h * (A51 * k1w + A52 * k2w + A53 * k3w + A54 * k4w)
        k5u = tw
        k5w = -nm1 / (r + C5 * h) * tw - q_at(r + C5 * h) * tu
        tu = u + h * (A61 * k1u + A62 * k2u + A63 * k3u + A64 * k4u + A65 * k5u)
        tw = w + h * (A61 * k1w + A62 * k2w + A63 * k3w + A64 * k4w + A65 * k5w)
        k6u = tw
        k6w = -nm1 / (r + h) * tw - q_at(r + h) * tu

        unew = u + h * (B1 * k1u + B3 * k3u + B4 * k4u + B5 * k5u + B6 * k6u)
        wnew = w + h * (B1 * k1w + B3 * k3w + B4 * k4w + B5 * k5w + B6 * k6w)
        rnew = r_end if at_stop else r + h
        k7u = wnew
        k7w = -nm1 / rnew * wnew - q_at(rnew) * unew

        eu = h * (E1 * k1u + E3 * k3u + E4 * k4u + E5 * k5u + E6 * k6u + E7 * k7u)
        ew = h * (E1 * k1w + E3 * k3w + E4 * k4w + E5 * k5w + E6 * k6w + E7 * k7w)
        su = atol + rtol * max(abs(u), abs(unew))
        sw = atol + rtol * max(abs(w), abs(wnew))
        err = math.sqrt(0.5 * ((eu / su) * (eu / su) + (ew / sw) * (ew / sw)))

        if err > 1.0:
            h = h * max(MIN_FACTOR, SAFETY * err ** -0.2)
            continue

        if unew <= 0.0:
            qu0 = k1u
            qu1 = k1u * P12 + k3u * P32 + k4u * P42 + k5u * P52 + k6u * P62 + k7u * P72
            qu2 = k1u * P13 + k3u * P33 + k4u * P43 + k5u * P53 + k6u * P63 + k7u * P73
            qu3 = k1u * P14 + k3u * P34 + k4u * P44 + k5u * P54 + k6u * P64 + k7u * P74
            lo = 0.0
            hi = 1.0
            th = 1.0
            uv = unew
            for _ in range(BISECT_ITERS):
                if abs(uv) <= U_POLISH_TOL:
                    break
                mid = 0.5 * (lo + hi)
                uv_mid = u + h * mid * (qu0 + mid * (qu1 + mid * (qu2 + mid * qu3)))
                if uv_mid <= 0.0:
                    hi = mid
                    th = mid
                    uv = uv_mid
                else:
                    lo = mid
            return PHI_ZERO_FOUND, r + th * h

        if at_stop:
            return PHI_NO_ZERO_END, rnew

        if err == 0.0:
            h = h * MAX_FACTOR
        else:
            h = h * min(MAX_FACTOR, SAFETY * err ** -0.2)
        r = rnew
        u = unew
        w = wnew
        k1u = k7u
        k1w = k7w
        if abs(u) > PHI_RENORM:
            u = u * 1e-100
            w = w * 1e-100
            k1u = k1u * 1e-100
            k1w = k1w * 1e-100


def rk4_shoot(kind, ga, gp, glam, n, m, r0, h, r_max, max_steps, sample_r):
    """Fixed-step classical RK4 oracle for the radial equation.

    Steps land exactly on each requested sample radius (ascending array);
    the zero crossing is polished by bisection on single RK4 sub-steps of
    the last full step.  Returns (status, R, u_samples); samples past the
    crossing are NaN.
    """
    nm1 = n - 1.0
    g0 = _g(kind, ga, gp, glam, m)
    r = r0
    u = m - g0 * r0 * r0 / (2.0 * n)
    w = -g0 * r0 / n
    ns = len(sample_r)
    u_samples = np.full(ns, np.nan)
    si = 0
    while si < ns and sample_r[si] <= r:
        u_samples[si] = u
        si += 1

    if u <= 0.0:
        return STATUS_HIT_ZERO, r, u_samples
    if 1.0 - u < 1e-9:
        return STATUS_BLEW_UP, r, u_samples

    def step(rr, uu, ww, hh):
        k1u = ww
        k1w = -nm1 / rr * ww - _g(kind, ga, gp, glam, uu)
        tu = uu + 0.5 * hh * k1u
        tw = ww + 0.5 * hh * k1w
        k2u = tw
        k2w = -nm1 / (rr + 0.5 * hh) * tw - _g(kind, ga, gp, glam, tu)
        tu = uu + 0.5 * hh * k2u
        tw = ww + 0.5 * hh * k2w
        k3u = tw
        k3w = -nm1 / (rr + 0.5 * hh) * tw - _g(kind, ga, gp, glam, tu)
        tu = uu + hh * k3u
        tw = ww + hh * k3w
        k4u = tw
        k4w = -nm1 / (rr + hh) * tw - _g(kind, ga, gp, glam, tu)
        un = uu + hh / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
        wn = ww + hh / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w)
        return un, wn

    steps = 0
    while True:
        steps += 1
        if steps > max_steps:
            return STATUS_STEP_LIMIT, r, u_samples
        target = r + h
        if si < ns and sample_r[si] < target:
            target = sample_r[si]
        if r_max < target:
            target = r_max
        hh = target - r
        unew, wnew = step(r, u, w, hh)

        if unew <= 0.0:
            lo = 0.0
            hi = hh
            for _ in range(BISECT_ITERS):
                mid = 0.5 * (lo + hi)
                um, _ = step(r, u, w, mid)
                if abs(um) <= U_POLISH_TOL:
                    hi = mid
                    break
                if um <= 0.0:
                    hi = mid
                else:
                    lo = mid
            return STATUS_HIT_ZERO, r + hi, u_samples

        r = target
        u = unew
        w = wnew
        while si < ns and sample_r[si] <= r:
            u_samples[si] = u
            si += 1
        if 1.0 - u < 1e-9:
            return STATUS_BLEW_UP, r, u_samples
        if r >= r_max:
            return STATUS_MAX_RADIUS, r, u_samples

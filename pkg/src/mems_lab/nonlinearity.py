"""Power blow-up nonlinearities f(t) = a (1 - t)^(-p) and their calculus.

The built-in family covers every explicit right-hand side used by the lab:

* ``mems``      -> a = 1, p = 2, the parallel-plate MEMS nonlinearity;
* ``cone:n``    -> a = n - 1, p = 1, matched to the cone 1 - |x|;
* ``bc:n:p``    -> a = (2/(1+p)) (2/(1+p) + n - 2), matched to the singular
  profile 1 - |x|^(2/(1+p)).

User families plug in through the same six-accessor contract (``f``,
``fprime``, ``fsecond``, ``F``, ``F_at_blowup``, ``flags``); see
`CustomNonlinearity`.  All accessors are pure and safe to call concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .errors import DomainError

# Below this gap to t = 1 evaluation is refused rather than returning inf;
# solver guards stop far earlier (eps_blow = 1e-9).
MIN_GAP = 1e-300

GAMMA_SAMPLE_COUNT = 40
GAMMA_TAIL = 8


def _gap(t: float) -> float:
    if not 0.0 <= t < 1.0:
        raise DomainError(f"nonlinearity argument t={t!r} outside [0, 1)")
    gap = 1.0 - t
    if gap < MIN_GAP:
        raise DomainError(f"1 - t = {gap!r} below the {MIN_GAP} overflow guard")
    return gap


@dataclass(frozen=True)
class NonlinearityFlags:
    """Structural predicates gating the theorems."""

    nonnegative: bool
    nondecreasing: bool
    convex: bool
    F1_infinite: bool


@dataclass(frozen=True)
class PowerBlowup:
    """f(t) = a (1 - t)^(-p) on [0, 1), a > 0, p > 0."""

    a: float
    p: float

    family = "power"

    def __post_init__(self):
        if not (self.a > 0.0 and math.isfinite(self.a)):
            raise DomainError(f"amplitude a={self.a!r} must be positive")
        if not (self.p > 0.0 and math.isfinite(self.p)):
            raise DomainError(f"exponent p={self.p!r} must be positive")

    def f(self, t: float) -> float:
        return self.a * _gap(t) ** -self.p

    def fprime(self, t: float) -> float:
        return self.a * self.p * _gap(t) ** (-self.p - 1.0)

    def fsecond(self, t: float) -> float:
        return self.a * self.p * (self.p + 1.0) * _gap(t) ** (-self.p - 2.0)

    def F(self, t: float) -> float:
        """Primitive int_0^t f, evaluated in closed form."""
        gap = _gap(t)
        if self.p == 1.0:
            return -self.a * math.log(gap)
        return self.a * (gap ** (1.0 - self.p) - 1.0) / (self.p - 1.0)

    def F_at_blowup(self) -> float:
        """lim_{t->1^-} F(t): a/(1-p) for p < 1, +inf otherwise."""
        if self.p < 1.0:
            return self.a / (1.0 - self.p)
        return math.inf

    def flags(self) -> NonlinearityFlags:
        return NonlinearityFlags(True, True, True, self.p >= 1.0)


@dataclass(frozen=True)
class ConstantNonlinearity:
    """f == c; the degenerate member of the accessor contract.

    Used for exactness tests (constant right-hand side integrates to a
    parabola) and as the simplest extension-contract example.
    """

    c: float

    family = "constant"

    def f(self, t: float) -> float:
        _gap(t)
        return self.c

    def fprime(self, t: float) -> float:
        _gap(t)
        return 0.0

    def fsecond(self, t: float) -> float:
        _gap(t)
        return 0.0

    def F(self, t: float) -> float:
        _gap(t)
        return self.c * t

    def F_at_blowup(self) -> float:
        return self.c

    def flags(self) -> NonlinearityFlags:
        return NonlinearityFlags(self.c >= 0.0, True, True, False)


@dataclass(frozen=True)
class CustomNonlinearity:
    """User-supplied family satisfying the accessor contract.

    The callables must be defined on [0, 1), with ``f_fn`` nonnegative and
    C^1 there; ``flags`` must describe the family truthfully since theorem
    checks are gated on them.  Custom families integrate through the pure
    Python kernel path regardless of the active backend.
    """

    f_fn: Callable[[float], float]
    fprime_fn: Callable[[float], float]
    fsecond_fn: Callable[[float], float]
    F_fn: Callable[[float], float]
    F1: float
    family_flags: NonlinearityFlags
    name: str = "custom"

    family = "custom"

    def f(self, t: float) -> float:
        return self.f_fn(t)

    def fprime(self, t: float) -> float:
        return self.fprime_fn(t)

    def fsecond(self, t: float) -> float:
        return self.fsecond_fn(t)

    def F(self, t: float) -> float:
        return self.F_fn(t)

    def F_at_blowup(self) -> float:
        return self.F1

    def flags(self) -> NonlinearityFlags:
        return self.family_flags


Nonlinearity = PowerBlowup | ConstantNonlinearity | CustomNonlinearity


def classify(spec: Nonlinearity) -> NonlinearityFlags:
    return spec.flags()


def bc_amplitude(n: int, p: float) -> float:
    """Amplitude (2/(1+p)) (2/(1+p) + n - 2) matching 1 - r^(2/(1+p))."""
    beta = 2.0 / (1.0 + p)
    return beta * (beta + n - 2.0)


def crandall_rabinowitz_gamma(spec: Nonlinearity) -> float:
    """gamma = liminf_{t->1} f f'' / f'^2; exactly (p+1)/p for the power family."""
    if isinstance(spec, PowerBlowup):
        return (spec.p + 1.0) / spec.p
    return gamma_liminf_estimate(spec)


def gamma_liminf_estimate(spec: Nonlinearity,
                          k_max: int = GAMMA_SAMPLE_COUNT,
                          tail: int = GAMMA_TAIL) -> float:
    """Numeric liminf estimator on the dyadic samples t_k = 1 - 2^-k.

    The ratio is evaluated as (f/f') * (f''/f') so the large powers of
    (1-t) cancel pairwise without overflow.  Returns the minimum over the
    last ``tail`` samples, which is the liminf for eventually monotone
    ratios.
    """
    samples = []
    for k in range(1, k_max + 1):
        t = 1.0 - 2.0 ** -k
        fp = spec.fprime(t)
        samples.append((spec.f(t) / fp) * (spec.fsecond(t) / fp))
    return min(samples[-tail:])


_ALIAS_HELP = "expected 'mems', 'cone:<n>', 'bc:<n>:<p>', 'power:<a>:<p>' or 'power'"


def parse_nonlinearity(name: str, a: float | None = None, p: float | None = None) -> PowerBlowup:
    """Resolve a CLI/config family string to a `PowerBlowup` spec."""
    parts = name.lower().split(":")
    head = parts[0]
    try:
        if head == "mems" and len(parts) == 1:
            return PowerBlowup(1.0, 2.0)
        if head == "cone" and len(parts) == 2:
            n = int(parts[1])
            if n < 2:
                raise DomainError(f"cone alias needs n >= 2, got {n}")
            return PowerBlowup(float(n - 1), 1.0)
        if head == "bc" and len(parts) == 3:
            n = int(parts[1])
            pp = float(parts[2])
            if n < 3 or pp <= 0.0:
                raise DomainError(f"bc alias needs n >= 3 and p > 0, got n={n}, p={pp}")
            return PowerBlowup(bc_amplitude(n, pp), pp)
        if head == "power":
            if len(parts) == 3:
                return PowerBlowup(float(parts[1]), float(parts[2]))
            if len(parts) == 1:
                if a is None or p is None:
                    raise DomainError("family 'power' requires explicit a and p")
                return PowerBlowup(float(a), float(p))
    except ValueError as exc:
        raise DomainError(f"malformed family {name!r}: {exc}") from exc
    raise DomainError(f"unknown family {name!r}; {_ALIAS_HELP}")


def spec_to_dict(spec: Nonlinearity) -> dict:
    if isinstance(spec, PowerBlowup):
        return {"family": "power", "a": spec.a, "p": spec.p}
    if isinstance(spec, ConstantNonlinearity):
        return {"family": "constant", "c": spec.c}
    return {"family": "custom", "name": spec.name}


def spec_from_dict(d: dict) -> Nonlinearity:
    family = d.get("family")
    if family == "power":
        return PowerBlowup(float(d["a"]), float(d["p"]))
    if family == "constant":
        return ConstantNonlinearity(float(d["c"]))
    raise DomainError(f"cannot rebuild nonlinearity from {d!r}")

"""Scalar functions and their first/second divided differences.

All kernels that enter the operator integrals live here: the power and
absolute-power families, the log divided difference, the curvature kernel
of t -> Tr|A+tB|^p, and the ratio kernels used by the quasi-entropy.
Every divided difference switches to a derivative/limit branch near
coincident arguments to avoid forward-difference cancellation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .config import DEFAULT, Tolerances
from .errors import DomainError, ParameterError

Interval = tuple[float, float]

REAL_LINE: tuple[Interval, ...] = ((-math.inf, math.inf),)
POSITIVE: tuple[Interval, ...] = ((0.0, math.inf),)
NONZERO: tuple[Interval, ...] = ((-math.inf, 0.0), (0.0, math.inf))


@dataclass(frozen=True)
class ScalarFunction:
    """A scalar function with explicit first/second derivative rules.

    ``pair_sum``, when provided, returns the cancellation-free closed form of
    f^[2](r,s,r) + f^[2](s,r,s) and is preferred by the operator integrals.
    """

    name: str
    fn: Callable[[float], float]
    dfn: Callable[[float], float]
    d2fn: Callable[[float], float]
    domain: tuple[Interval, ...] = REAL_LINE
    pair_sum: Callable[[float, float], float] | None = None

    def __call__(self, x: float) -> float:
        return self.fn(x)

    def d(self, x: float) -> float:
        return self.dfn(x)

    def d2(self, x: float) -> float:
        return self.d2fn(x)

    def contains(self, x: float) -> bool:
        return any(lo < x < hi for lo, hi in self.domain)

    def check_domain(self, x: float) -> None:
        if not self.contains(x):
            raise DomainError(f"{self.name} is undefined at x = {x}")


def _near(r: float, s: float, rtol: float) -> bool:
    return abs(r - s) <= rtol * max(1.0, abs(r), abs(s))


def power_abs(p: float) -> ScalarFunction:
    """x -> |x|^p on the punctured line (p > 1)."""
    if p <= 1.0:
        raise ParameterError(f"power_abs requires p > 1, got {p}")
    return ScalarFunction(
        name=f"abs_power({p})",
        fn=lambda x: abs(x) ** p,
        dfn=lambda x: p * abs(x) ** (p - 1.0) * math.copysign(1.0, x),
        d2fn=lambda x: p * (p - 1.0) * abs(x) ** (p - 2.0),
        domain=NONZERO,
        pair_sum=lambda r, s: fp_pair_sum(p, r, s),
    )


def power(alpha: float) -> ScalarFunction:
    """x -> x^alpha on (0, inf)."""
    return ScalarFunction(
        name=f"power({alpha})",
        fn=lambda x: x**alpha,
        dfn=lambda x: alpha * x ** (alpha - 1.0),
        d2fn=lambda x: alpha * (alpha - 1.0) * x ** (alpha - 2.0),
        domain=POSITIVE,
    )


SQUARE = ScalarFunction("square", lambda x: x * x, lambda x: 2.0 * x, lambda x: 2.0)
IDENTITY = ScalarFunction("identity", lambda x: x, lambda x: 1.0, lambda x: 0.0)
LOG = ScalarFunction(
    "log", math.log, lambda x: 1.0 / x, lambda x: -1.0 / (x * x), domain=POSITIVE
)


def custom(name, fn, dfn, d2fn, domain=REAL_LINE) -> ScalarFunction:
    """User-supplied (f, f', f'') triple."""
    return ScalarFunction(name, fn, dfn, d2fn, tuple(domain))


def div_diff1(f: ScalarFunction, r: float, s: float, tol: Tolerances = DEFAULT) -> float:
    """First divided difference (f(r)-f(s))/(r-s) with derivative limit branch."""
    f.check_domain(r)
    f.check_domain(s)
    if _near(r, s, tol.near_equal_rtol):
        return f.d(0.5 * (r + s))
    return (f(r) - f(s)) / (r - s)


def div_diff2(f: ScalarFunction, r: float, s: float, t: float, tol: Tolerances = DEFAULT) -> float:
    """Second divided difference, fully symmetric, with stable degenerate branches.

    Cases by coincidence pattern (threshold ``near_equal_rtol``):
    all three equal -> f''(mean)/2; exactly two equal -> the analytic
    derivative of the first divided difference; all distinct -> the raw
    difference quotient (no small denominators remain in that case).
    """
    for x in (r, s, t):
        f.check_domain(x)
    rtol = tol.near_equal_rtol
    rs, rt, st = _near(r, s, rtol), _near(r, t, rtol), _near(s, t, rtol)
    if rs and rt and st:
        return 0.5 * f.d2((r + s + t) / 3.0)
    if rs or rt or st:
        # rotate so the coincident pair sits in the last two slots
        if rs:
            pair, lone = 0.5 * (r + s), t
        elif rt:
            pair, lone = 0.5 * (r + t), s
        else:
            pair, lone = 0.5 * (s + t), r
        # d/dy (f(x)-f(y))/(x-y) at y = pair, x = lone
        return (div_diff1(f, lone, pair, tol) - f.d(pair)) / (lone - pair)
    return (div_diff1(f, r, s, tol) - div_diff1(f, r, t, tol)) / (s - t)


def fp_pair_sum(p: float, r: float, s: float, tol: Tolerances = DEFAULT) -> float:
    """Closed form of f^[2](r,s,r) + f^[2](s,r,s) for f = |x|^p.

    Same-sign arguments reduce to the divided difference of p|x|^(p-1) in
    the absolute values; opposite signs give the cancellation-free mixed
    form p(|r|^(p-1)+|s|^(p-1))/(|r|+|s|).
    """
    if p <= 1.0:
        raise ParameterError(f"fp_pair_sum requires p > 1, got {p}")
    if r == 0.0 or s == 0.0:
        raise DomainError("fp_pair_sum requires nonzero arguments")
    a, b = abs(r), abs(s)
    if r * s < 0.0:
        return p * (a ** (p - 1.0) + b ** (p - 1.0)) / (a + b)
    if _near(a, b, tol.near_equal_rtol):
        m = 0.5 * (a + b)
        return p * (p - 1.0) * m ** (p - 2.0)
    return p * (a ** (p - 1.0) - b ** (p - 1.0)) / (a - b)


def kernel_Fp(p: float, r: float, s: float, tol: Tolerances = DEFAULT) -> float:
    """Curvature kernel of t -> Tr|A+tB|^p on positive arguments.

    Equals p (r^(p-1) - s^(p-1)) / (r - s), with the p(p-1) r^(p-2) limit on
    the diagonal; identical to p * div_diff1(power(p-1), r, s).
    """
    if not 1.0 < p <= 2.0:
        raise ParameterError(f"kernel_Fp requires p in (1, 2], got {p}")
    if r <= 0.0 or s <= 0.0:
        raise DomainError("kernel_Fp requires positive arguments")
    return fp_pair_sum(p, r, s, tol)


def g_alpha(alpha: float, x: float, tol: Tolerances = DEFAULT) -> float:
    """((x^alpha - 1)/(x - 1))^(1/(alpha-1)), continuous at x=1.

    The base is evaluated by a second-order series for |x-1| below the
    Taylor window (0/0 removal).
    """
    if not 0.0 < alpha < 1.0:
        raise ParameterError(f"g_alpha requires alpha in (0, 1), got {alpha}")
    if x <= 0.0:
        raise DomainError(f"g_alpha requires x > 0, got {x}")
    u = x - 1.0
    if abs(u) <= tol.taylor_window:
        base = alpha * (
            1.0
            + (alpha - 1.0) / 2.0 * u
            + (alpha - 1.0) * (alpha - 2.0) / 6.0 * u * u
        )
    else:
        base = (x**alpha - 1.0) / u
    return base ** (1.0 / (alpha - 1.0))


def h_log(x: float, tol: Tolerances = DEFAULT) -> float:
    """(x - 1)/log(x) with value 1 at x = 1 (equals the mean of x^t over t in [0,1])."""
    if x <= 0.0:
        raise DomainError(f"h_log requires x > 0, got {x}")
    u = x - 1.0
    if abs(u) <= tol.taylor_window:
        return 1.0 + 0.5 * u - u * u / 12.0
    return u / math.log(x)


@dataclass(frozen=True)
class Kernel2:
    """Two-variable kernel F(x, y) with a rectangular domain (same axis intervals)."""

    name: str
    fn: Callable[[float, float], float]
    domain: tuple[Interval, ...] = POSITIVE
    symmetric: bool = False

    def __call__(self, x: float, y: float) -> float:
        return self.fn(x, y)

    def contains(self, x: float) -> bool:
        return any(lo < x < hi for lo, hi in self.domain)

    def check_domain(self, x: float) -> None:
        if not self.contains(x):
            raise DomainError(f"kernel {self.name} is undefined at {x}")


ONE_KERNEL = Kernel2("one", lambda x, y: 1.0, REAL_LINE, symmetric=True)


def divided_difference_kernel(f: ScalarFunction, tol: Tolerances = DEFAULT) -> Kernel2:
    """F(x, y) = f^[1](x, y); symmetric on f's domain."""
    return Kernel2(
        name=f"dd1[{f.name}]",
        fn=lambda x, y: div_diff1(f, x, y, tol),
        domain=f.domain,
        symmetric=True,
    )


def fp_kernel(p: float, tol: Tolerances = DEFAULT) -> Kernel2:
    if not 1.0 < p <= 2.0:
        raise ParameterError(f"fp_kernel requires p in (1, 2], got {p}")
    return Kernel2(
        name=f"Fp({p})", fn=lambda x, y: kernel_Fp(p, x, y, tol), symmetric=True
    )


def log_dd_kernel(tol: Tolerances = DEFAULT) -> Kernel2:
    """(log x - log y)/(x - y), the inverse of the ratio kernel of h_log."""
    return divided_difference_kernel(LOG, tol)


def kernel_from_ratio(f, name: str | None = None) -> Kernel2:
    """F(x, y) = f(x/y) * y on (0, inf)^2.

    With f = h_log this is (x-y)/(log x - log y), the pointwise reciprocal
    of the log divided-difference kernel.
    """
    label = name or f"ratio[{getattr(f, 'name', getattr(f, '__name__', 'f'))}]"

    def fn(x: float, y: float) -> float:
        if x <= 0.0 or y <= 0.0:
            raise DomainError(f"kernel {label} requires positive arguments")
        return f(x / y) * y

    return Kernel2(name=label, fn=fn)


def quasi_entropy_kernel(f, theta: float, name: str | None = None) -> Kernel2:
    """(f(x/y) y)^(-theta), the eigenbasis weight of the quasi-entropy."""
    if not 0.0 < theta <= 1.0:
        raise ParameterError(f"theta must lie in (0, 1], got {theta}")
    base = kernel_from_ratio(f, name=name)

    def fn(x: float, y: float) -> float:
        val = base(x, y)
        if val <= 0.0:
            raise DomainError(f"quasi-entropy weight requires f > 0, got f(x/y)y = {val}")
        return val ** (-theta)

    return Kernel2(name=name or f"{base.name}^(-{theta})", fn=fn)


def check_derivatives(f: ScalarFunction, points, step: float = 1e-5, rtol: float = 1e-6) -> float:
    """Max relative mismatch of the derivative rules against central differences.

    f' is checked against the central difference of f; f'' against the
    central difference of the (just validated) f' rule, which keeps the
    check within float64 reach at the default step.
    """
    worst = 0.0
    for x in points:
        d_num = (f(x + step) - f(x - step)) / (2.0 * step)
        d2_num = (f.d(x + step) - f.d(x - step)) / (2.0 * step)
        worst = max(
            worst,
            abs(d_num - f.d(x)) / max(1.0, abs(f.d(x))),
            abs(d2_num - f.d2(x)) / max(1.0, abs(f.d2(x))),
        )
    if worst > rtol:
        raise AssertionError(f"derivative rules of {f.name} disagree with FD: {worst:.3e}")
    return worst


__all__ = [
    "IDENTITY",
    "Kernel2",
    "LOG",
    "NONZERO",
    "ONE_KERNEL",
    "POSITIVE",
    "REAL_LINE",
    "SQUARE",
    "ScalarFunction",
    "check_derivatives",
    "custom",
    "div_diff1",
    "div_diff2",
    "divided_difference_kernel",
    "fp_kernel",
    "fp_pair_sum",
    "g_alpha",
    "h_log",
    "kernel_Fp",
    "kernel_from_ratio",
    "log_dd_kernel",
    "power",
    "power_abs",
    "quasi_entropy_kernel",
]

"""The two-parameter convolution kernel |x|^(alpha-Q) (1+|x|)^(-gamma) and its norms.

The kernel combines a fractional-integral singularity at the origin with an
extra polynomial damping at infinity controlled by gamma.  Its global p-norm
is finite exactly for p in an open interval determined by (Q, alpha, gamma),
and on that interval the norm is squeezed between explicit multiples of a
bilateral dyadic sum; `sandwich_check` verifies those brackets numerically.
Ball-restricted (Morrey-type) norms are provided with both a power weight and
a general profile weight.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._quadcore import QuadResult, cumulative_power_integrals
from .errors import DivergenceError, InputError
from .group import GroupDescriptor, quasi_norm, radial_integrate
from .plan import DEFAULT_PLAN, QuadraturePlan
from .profiles import (
    COND_OMEGA_KERNEL_INCLUSION,
    ConditionResult,
    OVERFLOW_GUARD,
    RadialProfile,
    check_condition,
)


@dataclass(frozen=True)
class KernelParams:
    """Kernel parameters bound to a group (which supplies Q)."""

    g: GroupDescriptor
    alpha: float
    gamma: float

    def __post_init__(self):
        if not (0 < self.alpha < self.g.Q):
            raise InputError(f"alpha must lie in (0, Q) = (0, {self.g.Q})")
        if self.gamma < 0:
            raise InputError("gamma must be >= 0")

    def radial(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return t ** (self.alpha - self.g.Q) * (1.0 + t) ** (-self.gamma)


def kernel_eval(k: KernelParams, x) -> np.ndarray:
    """Kernel value at x; the origin is a genuine singularity."""
    t = quasi_norm(k.g, x)
    if np.any(t == 0.0):
        raise InputError("kernel is singular at the origin")
    return k.radial(t)


def admissible_p1_interval(k: KernelParams) -> tuple[float, float]:
    """Open interval of exponents with a finite global kernel norm."""
    if k.gamma <= 0:
        raise InputError("no admissible exponents: the undamped kernel is never globally integrable")
    Q = k.g.Q
    return (Q / (Q + k.gamma - k.alpha), Q / (Q - k.alpha))


def dyadic_sum(k: KernelParams, p1: float, R: float = 1.0, tol: float = 1e-9) -> float:
    """Bilateral sum over dyadic scales: sum_k (2^k R)^a / (1 + 2^k R)^b.

    a = (alpha-Q) p1 + Q and b = gamma p1.  Convergence needs b > a > 0,
    i.e. p1 strictly inside the admissible interval; both geometric tails are
    bounded in closed form and truncated below tol.
    """
    if R <= 0:
        raise InputError("dyadic reference scale must be positive")
    Q = k.g.Q
    a = (k.alpha - Q) * p1 + Q
    b = k.gamma * p1
    if a <= 0:
        raise DivergenceError("dyadic kernel sum", "lower tail (small scales)")
    if b <= a:
        raise DivergenceError("dyadic kernel sum", "upper tail (large scales)")

    # terms <= (2^k R)^a below and <= (2^k R)^(a-b) above
    k_lo = math.floor((math.log(tol / 2 * (1 - 2.0**-a)) / a - math.log(R)) / math.log(2)) - 1
    k_hi = math.ceil((math.log(tol / 2 * (1 - 2.0 ** (a - b))) / (a - b) - math.log(R)) / math.log(2)) + 1
    ks = np.arange(k_lo, k_hi + 1, dtype=float)
    t = 2.0**ks * R
    terms = t**a / (1.0 + t) ** b
    return float(np.sum(terms[np.argsort(terms)]))


def kernel_lebesgue_norm(
    k: KernelParams, p1: float, plan: QuadraturePlan = DEFAULT_PLAN
) -> QuadResult:
    """Global p1-norm of the kernel by polar quadrature."""
    if k.gamma <= 0:
        raise DivergenceError("kernel norm", "undamped kernel is not globally integrable")
    lo, hi = admissible_p1_interval(k)
    if not (lo < p1 < hi):
        raise DivergenceError(
            "kernel norm", f"p1={p1:g} outside the admissible interval ({lo:g}, {hi:g})"
        )
    res = radial_integrate(k.g, lambda t: k.radial(t) ** p1, 0.0, math.inf, plan)
    value = res.value ** (1.0 / p1)
    err = value * (res.error / res.value) / p1 if res.value > 0 else res.error
    return QuadResult(value, err)


@dataclass(frozen=True)
class SandwichResult:
    lower_ok: bool
    upper_ok: bool
    c_lower: float
    c_upper: float
    dyadic_value: float
    norm_p1_power: float
    slack: float

    def to_dict(self) -> dict:
        return {
            "lower_ok": bool(self.lower_ok),
            "upper_ok": bool(self.upper_ok),
            "c_lower": self.c_lower,
            "c_upper": self.c_upper,
            "dyadic_value": self.dyadic_value,
            "norm_p1_power": self.norm_p1_power,
            "slack": self.slack,
        }


def sandwich_check(
    k: KernelParams,
    p1: float,
    R: float = 1.0,
    plan: QuadraturePlan = DEFAULT_PLAN,
    slack: float = 0.005,
) -> SandwichResult:
    """Both explicit brackets between the norm and the dyadic sum.

    With a = (alpha-Q) p1 + Q, the shellwise estimates give
    C_u = |sigma| (2^a - 1)/a and C_l = C_u / 2^(gamma p1)
    so that C_l S(R) <= (norm)^p1 <= C_u S(R); the comparison inflates the
    brackets by `slack` plus the quadrature's own relative error.
    """
    Q = k.g.Q
    a = (k.alpha - Q) * p1 + Q
    c_u = k.g.sigma * (2.0**a - 1.0) / a
    c_l = c_u / 2.0 ** (k.gamma * p1)
    norm = kernel_lebesgue_norm(k, p1, plan)
    s = dyadic_sum(k, p1, R, tol=min(1e-9, plan.tol * 1e-3))
    lhs = norm.value**p1
    rel = slack + p1 * norm.error / norm.value
    lower_ok = bool(c_l * s * (1.0 - rel) <= lhs)
    upper_ok = bool(lhs <= c_u * s * (1.0 + rel))
    return SandwichResult(lower_ok, upper_ok, c_l, c_u, s, lhs, rel)


def _norm_radii(plan: QuadraturePlan) -> np.ndarray:
    per, lo, hi = plan.norm_grid
    return 2.0 ** (np.arange(lo * per, hi * per + 1) / per)


def kernel_ball_integrals(
    k: KernelParams, p2: float, plan: QuadraturePlan = DEFAULT_PLAN
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(radii, integral of K^p2 over B(0, r), error) on the norm sup-grid."""
    if (k.alpha - k.g.Q) * p2 + k.g.Q <= 0:
        raise DivergenceError("kernel ball integral", "p2 too large for the origin singularity")
    radii = _norm_radii(plan)
    vals, errs = cumulative_power_integrals(
        lambda t: k.radial(t) ** p2,
        k.g.Q,
        radii,
        intervals=plan.radial_intervals,
        tol=plan.tol,
        knots=(1.0,),
        what="kernel ball integral",
    )
    return radii, k.g.sigma * vals, k.g.sigma * errs


def kernel_morrey_norm(
    k: KernelParams, p2: float, p1: float, plan: QuadraturePlan = DEFAULT_PLAN
) -> QuadResult:
    """Ball-power-weighted norm: sup_R R^(Q(1/p1 - 1/p2)) (int_B K^p2)^(1/p2)."""
    if p2 < 1 or p2 > p1:
        raise InputError("need 1 <= p2 <= p1")
    radii, vals, errs = kernel_ball_integrals(k, p2, plan)
    quot = radii ** (k.g.Q * (1.0 / p1 - 1.0 / p2)) * vals ** (1.0 / p2)
    i = int(np.argmax(quot))
    rel = errs[i] / vals[i] / p2 if vals[i] > 0 else 0.0
    return QuadResult(float(quot[i]), float(quot[i] * rel))


@dataclass(frozen=True)
class GenMorreyKernelNorm:
    value: float
    error: float
    bounded: bool
    inclusion: ConditionResult

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "error": self.error,
            "bounded": bool(self.bounded),
            "inclusion": self.inclusion.to_dict(),
        }


def kernel_gen_morrey_norm(
    k: KernelParams, p2: float, omega: RadialProfile, plan: QuadraturePlan = DEFAULT_PLAN
) -> GenMorreyKernelNorm:
    """Profile-weighted ball norm: sup_R (int_B K^p2)^(1/p2) / (omega(R) R^(Q/p2)).

    Also reports the profile-inclusion condition guaranteeing finiteness, and
    flags the result unbounded when the sup exceeds the overflow guard.
    """
    if p2 < 1:
        raise InputError("need p2 >= 1")
    radii, vals, errs = kernel_ball_integrals(k, p2, plan)
    om = omega.value(radii)
    if np.any(om <= 0):
        raise InputError("weight profile must be positive on the sup grid")
    quot = vals ** (1.0 / p2) / (om * radii ** (k.g.Q / p2))
    i = int(np.argmax(quot))
    rel = errs[i] / vals[i] / p2 if vals[i] > 0 else 0.0
    incl = check_condition(
        omega, COND_OMEGA_KERNEL_INCLUSION,
        {"Q": k.g.Q, "alpha": k.alpha, "p2": p2}, plan,
    )
    value = float(quot[i])
    return GenMorreyKernelNorm(value, float(value * rel), value <= OVERFLOW_GUARD, incl)

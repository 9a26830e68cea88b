"""Numerical application of the maximal and convolution-type operators.

All convolution operators share one engine: dyadic shells around the kernel
singularity, covered by tensor (abelian) or seeded quasi-Monte-Carlo
(Heisenberg) nodes, extended inward and outward octave by octave until the
contributions decay below tolerance, with analytic remainder bounds from the
kernel shape and the function's certified decay class.  Per-point error
estimates combine a coarse-resolution comparison with those bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.signal import convolve2d

from ._quadcore import improper_power_integral
from .errors import ConfigurationError, DivergenceError, HypothesisError, InputError
from .functions import POWER_CAP, DecayClass, GridFunction, TestFunction, sample_to_grid
from .group import (
    LAW_ABELIAN,
    GroupDescriptor,
    multiply,
    quasi_norm,
    triangle_constant,
)
from .kernels import KernelParams
from .plan import DEFAULT_PLAN, QuadraturePlan
from .profiles import (
    COND_RHO_BESSEL_INTEGRABLE,
    COND_RHO_FRAC_INTEGRABLE,
    COND_RHO_KERNEL_LIPSCHITZ,
    COND_RHO_TAIL_DECAY,
    RadialProfile,
    check_condition,
)
from .quad import (
    ball_nodes_centered,
    ball_overlap_window,
    shell_cover,
    sphere_ball_overlap,
)

__all__ = [
    "OperatorResult",
    "maximal_function",
    "MaximalOperator",
    "apply_bessel_riesz",
    "apply_gen_bessel_riesz",
    "apply_gen_fractional",
    "apply_mod_fractional",
    "mod_fractional_offset",
    "ConvolutionOperator",
    "bessel_riesz_operator",
    "gen_bessel_riesz_operator",
    "gen_fractional_operator",
    "mod_fractional_operator",
    "cancellation_decay",
    "convolve_young",
]

_CHUNK = 1 << 20


@dataclass(frozen=True)
class OperatorResult:
    """Operator values at the requested points with per-point error estimates."""

    points: np.ndarray
    values: np.ndarray
    errors: np.ndarray
    plan: QuadraturePlan

    def __post_init__(self):
        if np.any(self.errors < 0):
            raise InputError("error estimates must be nonnegative")


def _as_points(g: GroupDescriptor, points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[None, :]
    if pts.shape[-1] != g.n:
        raise InputError(f"points have dimension {pts.shape[-1]}, group needs {g.n}")
    return pts.reshape(-1, g.n)


# ----------------------------------------------------------------------------
# convolution engine
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class _KernelShape:
    """Radial kernel profile with the handles the engine needs."""

    fn: Callable[[np.ndarray], np.ndarray]
    knots: tuple[float, ...] = ()
    what: str = "convolution"

    def mass(self, g: GroupDescriptor, lo: float, hi: float, extra_exp: float = 0.0) -> float:
        """|sigma| * int_lo^hi kern(t) t^(Q + extra_exp - 1) dt (may raise)."""
        res = improper_power_integral(
            self.fn, g.Q + extra_exp, lo, hi, intervals=8, tol=1e-4,
            knots=self.knots, what=self.what,
        )
        return g.sigma * res.value


def _outer_requirement(g: GroupDescriptor, dec: DecayClass, max_x: float) -> float:
    ct = triangle_constant(g)
    if dec.kind == "compact":
        return ct * (max_x + dec.radius) * (1 + 1e-9)
    return max(2 * ct * max_x, 2 * ct * dec.valid_from, 1.0)


def _outer_tail_bound(
    g: GroupDescriptor, kern: _KernelShape, dec: DecayClass, R: float
) -> float:
    """Bound for the integral over |z| >= R using the certified decay envelope."""
    ct = triangle_constant(g)
    if dec.kind == "compact":
        return 0.0
    if dec.kind == "power":
        c_env = dec.const * (2 * ct) ** abs(dec.exponent)
        env = lambda t: kern.fn(t) * t**dec.exponent
        res = improper_power_integral(
            env, g.Q, R, math.inf, intervals=8, tol=1e-3, knots=kern.knots,
            what=f"{kern.what} outer tail",
        )
        return g.sigma * c_env * res.value
    width = dec.width * 2 * ct
    env = lambda t: kern.fn(t) * np.exp(-((t / width) ** 2))
    res = improper_power_integral(
        env, g.Q, R, math.inf, intervals=8, tol=1e-3, knots=kern.knots,
        what=f"{kern.what} outer tail",
    )
    return g.sigma * dec.const * res.value


def _inner_bound(
    f: TestFunction, g: GroupDescriptor, kern: _KernelShape, pts: np.ndarray, delta: float
) -> float:
    """Bound for the integral over |z| < delta (worst point)."""
    ct = triangle_constant(g)
    sing = f.origin_singularity()
    worst = 0.0
    norms = quasi_norm(g, pts)
    try:
        near_mass = kern.mass(g, 0.0, delta)
    except DivergenceError:
        raise DivergenceError(kern.what, "kernel not integrable near its pole")
    for x, d in zip(pts, norms):
        sup = f.sup_on_ball(g, x, delta)
        if math.isfinite(sup):
            worst = max(worst, sup * near_mass)
            continue
        c_f, s_f = sing
        if s_f + g.Q <= 0:
            raise DivergenceError(kern.what, "function not integrable at its singular point")
        term1 = c_f * 2.0 ** abs(s_f) * kern.mass(g, 0.0, delta, extra_exp=s_f)
        if d > POWER_CAP:
            edge = max(d / (2 * ct), delta)
            kval = float(kern.fn(np.array([edge]))[0])
            term2 = c_f * kval * g.sigma * (2 * ct * delta) ** (s_f + g.Q) / (s_f + g.Q)
        else:
            term2 = 0.0
        worst = max(worst, term1 + term2)
    return worst


class ConvolutionOperator:
    """x -> integral of kern(|z|) f(z^-1 x) dz, adaptively truncated shells."""

    def __init__(
        self,
        f: TestFunction,
        g: GroupDescriptor,
        kern: _KernelShape,
        plan: QuadraturePlan = DEFAULT_PLAN,
    ):
        self.f = f
        self.g = g
        self.kern = kern
        self.plan = plan
        self._far_nodes = None
        self._far_coarse = None
        self._validate()

    def _validate(self):
        sing = self.f.origin_singularity()
        if sing is not None and sing[1] + self.g.Q <= 0:
            raise DivergenceError(self.kern.what, "function not integrable at its singular point")

    def _octave(self, e: int, plan: QuadraturePlan, salt: int) -> tuple[np.ndarray, np.ndarray]:
        a, b = 2.0**e, 2.0 ** (e + 1)
        kn = tuple(v for v in self.kern.knots if a < v < b)
        if self.g.law == LAW_ABELIAN:
            z, w, t = shell_cover(self.g, a, b, plan, knots=kn)
        else:
            from .quad import shell_nodes_qmc

            z, w, t = shell_nodes_qmc(self.g, a, b, plan, shell_index=2 * e + 4096 + salt)
        return z, w * self.kern.fn(t)

    def _contrib(self, X: np.ndarray, z: np.ndarray, kw: np.ndarray) -> np.ndarray:
        out = np.empty(len(X))
        step = max(1, _CHUNK // max(1, len(z)))
        for i in range(0, len(X), step):
            xb = X[i : i + step]
            y = multiply(self.g, -z[None, :, :], xb[:, None, :])
            vals = self.f.eval(self.g, y)
            out[i : i + step] = (vals * kw[None, :]).sum(axis=1)
        return out

    def _support_nodes(self, f: TestFunction, plan: QuadraturePlan):
        """Nodes (Y, Wf) with integral ~ sum Wf_j kern(|x Y_j^-1|) for
        compactly supported f; Wf already carries the function values."""
        g = self.g
        if f.kind == "combo":
            ys, ws = [], []
            for coef, m in f.members:
                y, w = self._support_nodes(m, plan)
                ys.append(y)
                ws.append(coef * w)
            return np.concatenate(ys), np.concatenate(ws)
        if f.kind == "shifted":
            y, w = self._support_nodes(f.base, plan)
            z = np.asarray(f.z, dtype=float)
            return multiply(g, z[None, :], y), w
        ball = f.support_ball(g)
        if ball is None:
            raise InputError("support nodes need a compactly supported function")
        _, S = ball
        pts, w = ball_nodes_centered(
            g, S, plan, knots=f.radial_knots(), inner_octaves=45, radial_per_octave=4,
        )
        return pts, w * f.eval(g, pts)

    def _apply_far(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """y-space quadrature over the support for points far from it; the
        kernel is smooth there, which the z-shells cannot exploit when the
        support subtends a tiny angular window."""
        if self._far_nodes is None:
            self._far_nodes = self._support_nodes(self.f, self.plan)
            self._far_coarse = self._support_nodes(self.f, self.plan.coarsened())
        vals = np.empty(len(X))
        errs = np.empty(len(X))
        for nodes, out in ((self._far_nodes, vals), (self._far_coarse, errs)):
            Y, Wf = nodes
            step = max(1, _CHUNK // max(1, len(Wf)))
            for i in range(0, len(X), step):
                t = quasi_norm(self.g, multiply(self.g, X[i : i + step, None, :], -Y[None, :, :]))
                out[i : i + step] = (self.kern.fn(t) * Wf[None, :]).sum(axis=1)
        return vals, 2.5 * np.abs(vals - errs)

    def apply(self, points) -> OperatorResult:
        g = self.g
        X = _as_points(g, points)
        ball = self.f.support_ball(g) if g.law == LAW_ABELIAN else None
        if ball is not None:
            c, S = ball
            dxc = quasi_norm(g, X - c[None, :])
            far = dxc > 4.0 * S
            if np.any(far):
                vals = np.empty(len(X))
                errs = np.empty(len(X))
                fv, fe = self._apply_far(X[far])
                vals[far], errs[far] = fv, fe
                if np.any(~far):
                    near = self._apply_shells(X[~far])
                    vals[~far], errs[~far] = near.values, near.errors
                return OperatorResult(X, vals, errs, self.plan)
        return self._apply_shells(X)

    def _apply_shells(self, X: np.ndarray) -> OperatorResult:
        g, plan = self.g, self.plan
        dec = self.f.decay(g)
        max_x = float(quasi_norm(g, X).max()) if len(X) else 0.0
        r_req = _outer_requirement(g, dec, max_x)
        cplan = plan.coarsened()

        acc = np.zeros(len(X))
        acc_c = np.zeros(len(X))
        floor = 1e-300
        rel_stop = plan.tol / 20.0

        e_lo0, e_hi0 = -2, max(0, int(math.ceil(math.log2(r_req))))
        for e in range(e_lo0, e_hi0):
            z, kw = self._octave(e, plan, 0)
            acc += self._contrib(X, z, kw)
            zc, kwc = self._octave(e, cplan, 1)
            acc_c += self._contrib(X, zc, kwc)

        # outward extension
        e = e_hi0
        small = 0
        e_max = int(math.ceil(math.log2(plan.r_max)))
        while e < e_max:
            z, kw = self._octave(e, plan, 0)
            d = self._contrib(X, z, kw)
            acc += d
            zc, kwc = self._octave(e, cplan, 1)
            acc_c += self._contrib(X, zc, kwc)
            e += 1
            rel = float(np.max(np.abs(d))) / (float(np.max(np.abs(acc))) + floor)
            small = small + 1 if rel <= rel_stop else 0
            if small >= 3:
                break
        r_final = 2.0**e
        outer = _outer_tail_bound(g, self.kern, dec, r_final)

        # inward: forced to plan.delta_min, then extension
        e = e_lo0 - 1
        e_floor = int(math.floor(math.log2(plan.delta_min)))
        small = 0
        while e >= e_floor - 30:
            z, kw = self._octave(e, plan, 0)
            d = self._contrib(X, z, kw)
            acc += d
            zc, kwc = self._octave(e, cplan, 1)
            acc_c += self._contrib(X, zc, kwc)
            e -= 1
            if e >= e_floor:
                continue
            rel = float(np.max(np.abs(d))) / (float(np.max(np.abs(acc))) + floor)
            small = small + 1 if rel <= rel_stop else 0
            if small >= 3:
                break
        delta_final = 2.0 ** (e + 1)
        inner = _inner_bound(self.f, g, self.kern, X, delta_final)

        # 2.5x guards against oscillatory convergence on jump integrands
        errs = 2.5 * np.abs(acc - acc_c) + inner + outer
        return OperatorResult(X, acc, errs, plan)

    def __call__(self, points) -> np.ndarray:
        return self.apply(points).values


# ----------------------------------------------------------------------------
# concrete operators
# ----------------------------------------------------------------------------


def bessel_riesz_operator(
    f: TestFunction, g: GroupDescriptor, k: KernelParams, plan: QuadraturePlan = DEFAULT_PLAN
) -> ConvolutionOperator:
    if k.g is not g and k.g != g:
        raise InputError("kernel parameters are bound to a different group")
    shape = _KernelShape(k.radial, (), "fractional convolution")
    return ConvolutionOperator(f, g, shape, plan)


def apply_bessel_riesz(
    f: TestFunction,
    g: GroupDescriptor,
    k: KernelParams,
    points,
    plan: QuadraturePlan = DEFAULT_PLAN,
) -> OperatorResult:
    """Convolution with the damped fractional kernel |z|^(alpha-Q)(1+|z|)^(-gamma)."""
    return bessel_riesz_operator(f, g, k, plan).apply(points)


def gen_bessel_riesz_operator(
    f: TestFunction,
    g: GroupDescriptor,
    rho: RadialProfile,
    gamma: float,
    plan: QuadraturePlan = DEFAULT_PLAN,
) -> ConvolutionOperator:
    if gamma < 0:
        raise InputError("gamma must be >= 0")
    cond = check_condition(rho, COND_RHO_BESSEL_INTEGRABLE, {"Q": g.Q, "gamma": gamma}, plan)
    if not cond.holds:
        raise HypothesisError(COND_RHO_BESSEL_INTEGRABLE, "kernel profile fails near zero")
    shape = _KernelShape(
        lambda t: rho.value(t) * (1.0 + t) ** (-gamma), rho.knots(), "profile convolution"
    )
    return ConvolutionOperator(f, g, shape, plan)


def apply_gen_bessel_riesz(
    f: TestFunction,
    g: GroupDescriptor,
    rho: RadialProfile,
    gamma: float,
    points,
    plan: QuadraturePlan = DEFAULT_PLAN,
) -> OperatorResult:
    """Convolution with kernel rho(|z|)(1+|z|)^(-gamma); the profile must be
    integrable against t^(Q-gamma-1) near zero (checked before quadrature)."""
    return gen_bessel_riesz_operator(f, g, rho, gamma, plan).apply(points)


def gen_fractional_operator(
    f: TestFunction, g: GroupDescriptor, rho: RadialProfile, plan: QuadraturePlan = DEFAULT_PLAN
) -> ConvolutionOperator:
    cond = check_condition(rho, COND_RHO_FRAC_INTEGRABLE, {}, plan)
    if not cond.holds:
        raise HypothesisError(COND_RHO_FRAC_INTEGRABLE, "kernel profile fails near zero")
    shape = _KernelShape(lambda t: rho.value(t) * t ** (-g.Q), rho.knots(), "fractional convolution")
    return ConvolutionOperator(f, g, shape, plan)


def apply_gen_fractional(
    f: TestFunction,
    g: GroupDescriptor,
    rho: RadialProfile,
    points,
    plan: QuadraturePlan = DEFAULT_PLAN,
) -> OperatorResult:
    """Convolution with kernel rho(|z|)/|z|^Q; rho(t)/t must be integrable at 0."""
    return gen_fractional_operator(f, g, rho, plan).apply(points)


def _check_mod_fractional_profile(g: GroupDescriptor, rho: RadialProfile, plan: QuadraturePlan):
    for cond_id, params in (
        (COND_RHO_FRAC_INTEGRABLE, {}),
        (COND_RHO_TAIL_DECAY, {}),
        (COND_RHO_KERNEL_LIPSCHITZ, {"Q": g.Q}),
    ):
        cond = check_condition(rho, cond_id, params, plan)
        if not cond.holds:
            raise HypothesisError(cond_id, "profile unsuitable for the modified operator")


def mod_fractional_offset(
    f: TestFunction, g: GroupDescriptor, rho: RadialProfile, plan: QuadraturePlan = DEFAULT_PLAN
) -> float:
    """The x-independent subtracted term: int_{|y| >= 1} rho(|y|) |y|^-Q f(y) dy."""
    shape = _KernelShape(lambda t: rho.value(t) * t ** (-g.Q), rho.knots(), "offset integral")
    op = ConvolutionOperator(f, g, shape, plan)
    dec = f.decay(g)
    r_req = max(2.0, _outer_requirement(g, dec, 0.0))
    origin = np.zeros((1, g.n))
    acc = 0.0
    e_hi0 = int(math.ceil(math.log2(r_req)))
    e_max = int(math.ceil(math.log2(plan.r_max)))
    small = 0
    for e in range(0, e_max):
        d = float(op._contrib(origin, *op._octave(e, plan, 0))[0])
        acc += d
        if e + 1 < e_hi0:
            continue
        small = small + 1 if abs(d) <= plan.tol / 20.0 * (abs(acc) + 1e-300) else 0
        if small >= 3:
            break
    return acc


class _ModFractionalOperator:
    """Difference kernel operator: plain fractional part minus a constant."""

    def __init__(self, f, g, rho, plan):
        _check_mod_fractional_profile(g, rho, plan)
        self.base = gen_fractional_operator(f, g, rho, plan)
        self.offset = mod_fractional_offset(f, g, rho, plan)

    def apply(self, points) -> OperatorResult:
        res = self.base.apply(points)
        return OperatorResult(res.points, res.values - self.offset, res.errors, res.plan)

    def __call__(self, points) -> np.ndarray:
        return self.apply(points).values


def mod_fractional_operator(
    f: TestFunction, g: GroupDescriptor, rho: RadialProfile, plan: QuadraturePlan = DEFAULT_PLAN
) -> _ModFractionalOperator:
    return _ModFractionalOperator(f, g, rho, plan)


def apply_mod_fractional(
    f: TestFunction,
    g: GroupDescriptor,
    rho: RadialProfile,
    points,
    plan: QuadraturePlan = DEFAULT_PLAN,
) -> OperatorResult:
    """Modified fractional operator: the kernel difference subtracts the
    x-independent far-field term, so the result is the plain operator minus a
    constant (separately finite for compactly supported functions)."""
    return mod_fractional_operator(f, g, rho, plan).apply(points)


# ----------------------------------------------------------------------------
# maximal operator
# ----------------------------------------------------------------------------


def _knot_pieces(a: np.ndarray, b: np.ndarray, knots) -> list[tuple[np.ndarray, np.ndarray]]:
    """Split per-point intervals [a, b] at fixed knot radii (profile jumps)."""
    edges = [a]
    for k in sorted(knots):
        edges.append(np.clip(np.full_like(a, k), a, b))
    edges.append(b)
    return [(lo, hi) for lo, hi in zip(edges[:-1], edges[1:])]


class MaximalOperator:
    """Centred maximal operator: sup over a radius grid of ball averages.

    On box-ball groups (max-aniso, and intervals in n = 1) each average is a
    tensor Gauss-Legendre rule over the ball box intersected with the
    function's support box, which resolves thin overlaps that polar charts
    around the centre would miss; other groups use translated polar charts.
    """

    def __init__(
        self,
        f: TestFunction,
        g: GroupDescriptor,
        r_grid: Optional[Sequence[float]] = None,
        plan: QuadraturePlan = DEFAULT_PLAN,
    ):
        self.f = f
        self.g = g
        self.plan = plan
        if r_grid is None:
            per, lo, hi = plan.maximal_grid
            r_grid = 2.0 ** (np.arange(lo * per, hi * per + 1) / per)
        self.r_grid = np.asarray(r_grid, dtype=float)
        if self.r_grid.size == 0:
            raise InputError("maximal radius grid must be nonempty")
        overlap_ok = g.law == LAW_ABELIAN and (g.norm == "max-aniso" or g.n <= 2)
        self._slicing = f.is_radial() and overlap_ok
        self._knots = f.radial_knots() if self._slicing else ()
        self._boxy = (g.norm == "max-aniso" or g.n == 1) and not self._slicing
        if self._boxy:
            self._support = f.support_box(g)
        elif not self._slicing:
            sph = max(4, plan.sphere_order // 2)
            self._node_sets = [
                ball_nodes_centered(g, float(r), plan, inner_octaves=10, sphere_order=sph,
                                    radial_per_octave=3)
                for r in self.r_grid
            ]
            self._coarse_sets = [
                ball_nodes_centered(g, float(r), plan, inner_octaves=8,
                                    sphere_order=max(4, sph // 2), radial_per_octave=2)
                for r in self.r_grid
            ]

    def _radial_cumulative(self, t_hi: float):
        """Interpolant for |sigma| * integral_0^t |F(s)| s^(Q-1) ds."""
        g = self.g
        lo = t_hi * 2.0**-60
        knots = [k for k in self.f.radial_knots() if lo < k < t_hi]
        u = np.unique(np.concatenate([
            np.linspace(math.log(lo), math.log(t_hi), 24 * 60 + 1),
            np.log(np.asarray(knots)) if knots else np.empty(0),
        ]))
        from ._quadcore import simpson_on_blocks

        fine, _ = simpson_on_blocks(
            lambda uu: np.abs(self.f.radial_values(np.exp(uu))) * np.exp(g.Q * uu), u, 4
        )
        cum = g.sigma * np.concatenate([[0.0], np.cumsum(fine)])
        pos = np.nonzero(cum > 0)[0]
        if pos.size == 0:
            return lambda t: np.zeros_like(np.asarray(t, dtype=float))
        j0 = pos[0]
        uj, cj = u[j0:], np.log(cum[j0:])

        def C(t: np.ndarray) -> np.ndarray:
            # log-log interpolation is exact for pure powers and keeps the
            # relative error of the cumulative flat across scales
            t = np.asarray(t, dtype=float)
            tt = np.clip(t, np.exp(uj[0]), np.exp(uj[-1]))
            vals = np.exp(np.interp(np.log(tt), uj, cj))
            vals = np.where(t < np.exp(uj[0]), vals * (t / np.exp(uj[0])) ** g.Q, vals)
            return vals * (t > 0)

        return C

    def _face_part_box(self, X, r, t_full, xg, wg) -> np.ndarray:
        """Partial-overlap mass for box balls, one face at a time.

        Each face (i, sign) is active on its own t-window (scale r^nu_i), so
        a shared window would under-resolve the narrow faces; per-face
        Gauss-Legendre keeps every scale exact.
        """
        g = self.g
        nu = np.array(g.weights)
        half_box = float(r) ** nu
        out = np.zeros(len(X))
        for i in range(g.n):
            others = [j for j in range(g.n) if j != i]
            for sign in (1.0, -1.0):
                lo_pow = np.maximum(sign * X[:, i] - half_box[i], 0.0)
                hi_pow = np.maximum(sign * X[:, i] + half_box[i], 0.0)
                a = np.maximum(lo_pow ** (1.0 / nu[i]), t_full)
                b = np.maximum(hi_pow ** (1.0 / nu[i]), a)
                for lo_e, hi_e in _knot_pieces(a, b, self._knots):
                    width = hi_e - lo_e
                    mid = 0.5 * (lo_e + hi_e)
                    t = mid[:, None] + 0.5 * width[:, None] * xg[None, :]
                    frac = np.full(t.shape, g.weights[i])
                    with np.errstate(divide="ignore", invalid="ignore"):
                        for j in others:
                            tp = t ** nu[j]
                            wlo = (X[:, j : j + 1] - half_box[j]) / tp
                            whi = (X[:, j : j + 1] + half_box[j]) / tp
                            frac = frac * np.clip(
                                np.minimum(whi, 1.0) - np.maximum(wlo, -1.0), 0.0, 2.0
                            )
                    frac = np.nan_to_num(frac, nan=0.0, posinf=0.0)
                    Fv = np.abs(self.f.radial_values(np.maximum(t, 1e-300)))
                    contrib = ((Fv * frac * t ** (g.Q - 1)) * wg[None, :]).sum(axis=1)
                    out += np.maximum(contrib * 0.5 * width, 0.0)
        return out

    def _averages_sliced(self, X: np.ndarray, n_window: int) -> np.ndarray:
        """Radial slicing: the ball average of a radial function splits into
        the cumulative profile mass over the fully-covered spheres plus
        exact-window quadrature across the partially covered ones."""
        g = self.g
        norms = quasi_norm(g, X)
        max_t = (float(norms.max()) if len(X) else 0.0) + float(self.r_grid.max())
        C = self._radial_cumulative(max_t * 1.001)
        xg, wg = np.polynomial.legendre.leggauss(n_window)
        boxy = g.norm == "max-aniso"
        out = np.zeros(len(X))
        for r in self.r_grid:
            denom = g.vol1 * r**g.Q
            t_full, t_lo, t_hi = ball_overlap_window(g, X, float(r))
            step = max(1, _CHUNK // (max(1, n_window) * 2 * g.n))
            for i in range(0, len(X), step):
                sl = slice(i, i + step)
                if boxy:
                    part = self._face_part_box(X[sl], float(r), t_full[sl], xg, wg)
                else:
                    part = np.zeros(len(X[sl]))
                    for lo_e, hi_e in _knot_pieces(t_lo[sl], t_hi[sl], self._knots):
                        half = 0.5 * (hi_e - lo_e)
                        t = 0.5 * (hi_e + lo_e)[:, None] + half[:, None] * xg[None, :]
                        m = sphere_ball_overlap(g, t, X[sl], float(r))
                        Fv = np.abs(self.f.radial_values(np.maximum(t, 1e-300)))
                        part += np.maximum(
                            ((Fv * m * t ** (g.Q - 1)) * (half[:, None] * wg[None, :])).sum(axis=1),
                            0.0,
                        )
                avg = (C(t_full[sl]) + part) / denom
                out[sl] = np.maximum(out[sl], avg)
        return out

    def _averages_polar(self, X: np.ndarray, node_sets) -> np.ndarray:
        out = np.full(len(X), -np.inf)
        for r, (u, w) in zip(self.r_grid, node_sets):
            denom = self.g.vol1 * r**self.g.Q
            step = max(1, _CHUNK // max(1, len(w)))
            for i in range(0, len(X), step):
                xb = X[i : i + step]
                y = multiply(self.g, xb[:, None, :], u[None, :, :])
                vals = np.abs(self.f.eval(self.g, y))
                avg = (vals * w[None, :]).sum(axis=1) / denom
                out[i : i + step] = np.maximum(out[i : i + step], avg)
        return out

    def _averages_box(self, X: np.ndarray, m: int) -> np.ndarray:
        g = self.g
        nu = np.array(g.weights)
        xg, wg = np.polynomial.legendre.leggauss(max(2, m))
        out = np.full(len(X), 0.0)
        for r in self.r_grid:
            half = r**nu
            denom = g.vol1 * r**g.Q
            lo = X - half[None, :]
            hi = X + half[None, :]
            if self._support is not None:
                lo = np.maximum(lo, -self._support[None, :])
                hi = np.minimum(hi, self._support[None, :])
            width = np.clip(hi - lo, 0.0, None)
            mid = 0.5 * (hi + lo)
            idx = np.nonzero(np.all(width > 0, axis=1))[0]
            if idx.size == 0:
                continue
            integ = np.zeros(len(X))
            step = max(1, _CHUNK // (len(xg) ** g.n))
            for i0 in range(0, len(idx), step):
                rows = idx[i0 : i0 + step]
                nodes = [
                    mid[rows, d, None] + 0.5 * width[rows, d, None] * xg[None, :]
                    for d in range(g.n)
                ]
                wts_ax = [0.5 * width[rows, d, None] * wg[None, :] for d in range(g.n)]
                if g.n == 1:
                    pts = nodes[0][..., None]
                    wts = wts_ax[0]
                elif g.n == 2:
                    pts = np.stack(
                        np.broadcast_arrays(nodes[0][:, :, None], nodes[1][:, None, :]),
                        axis=-1,
                    ).reshape(len(rows), -1, 2)
                    wts = (wts_ax[0][:, :, None] * wts_ax[1][:, None, :]).reshape(len(rows), -1)
                else:
                    pts = np.stack(
                        np.broadcast_arrays(
                            nodes[0][:, :, None, None],
                            nodes[1][:, None, :, None],
                            nodes[2][:, None, None, :],
                        ),
                        axis=-1,
                    ).reshape(len(rows), -1, 3)
                    wts = (
                        wts_ax[0][:, :, None, None]
                        * wts_ax[1][:, None, :, None]
                        * wts_ax[2][:, None, None, :]
                    ).reshape(len(rows), -1)
                vals = np.abs(self.f.eval(g, pts))
                integ[rows] = (vals * wts).sum(axis=1)
            out = np.maximum(out, integ / denom)
        return out

    def apply(self, points) -> OperatorResult:
        X = _as_points(self.g, points)
        if self._slicing:
            full = self._averages_sliced(X, 64)
            coarse = self._averages_sliced(X, 32)
        elif self._boxy:
            m = max(8, self.plan.sphere_order)
            full = self._averages_box(X, m)
            coarse = self._averages_box(X, max(4, m // 2))
        else:
            full = self._averages_polar(X, self._node_sets)
            coarse = self._averages_polar(X, self._coarse_sets)
        errs = 2.5 * np.abs(full - coarse) + self.plan.tol * np.abs(full) * 0.1
        return OperatorResult(X, full, errs, self.plan)

    def __call__(self, points) -> np.ndarray:
        return self.apply(points).values


def maximal_function(
    f: TestFunction,
    g: GroupDescriptor,
    points,
    r_grid: Optional[Sequence[float]] = None,
    plan: QuadraturePlan = DEFAULT_PLAN,
) -> OperatorResult:
    """Centred maximal function over the given radius grid.

    The ball average at radius r uses the true Haar measure vol1 * r^Q of the
    quasi-ball.
    """
    return MaximalOperator(f, g, r_grid, plan).apply(points)


# ----------------------------------------------------------------------------
# cancellation decay of the modified-kernel normalisation
# ----------------------------------------------------------------------------


def cancellation_decay(
    g: GroupDescriptor,
    rho: RadialProfile,
    x,
    R: float,
    plan: QuadraturePlan = DEFAULT_PLAN,
) -> float:
    """Truncation of the normalising integral of the modified operator.

    Computes A(x, R) = int_{B(0,R)} [ k(xy^-1) - k(y) ] dy with
    k(y) = rho(|y|)/|y|^Q; substituting u = x y^-1 turns the first piece into
    the same radial kernel over the shifted ball, so A reduces to an exact
    radial slicing of the symmetric difference of two congruent balls.  The
    full integral vanishes, so A(x, R) -> 0 as R grows.

    Only abelian groups are supported: the angular measures of off-centre
    balls have closed forms there.
    """
    if g.law != LAW_ABELIAN:
        raise ConfigurationError("cancellation decay needs an abelian group")
    x = np.asarray(x, dtype=float).reshape(g.n)
    if R <= 0:
        raise InputError("truncation radius must be positive")
    d = float(quasi_norm(g, x))
    if d == 0.0:
        return 0.0
    m_x = lambda t: sphere_ball_overlap(g, t, x[None, :], R)[0]
    if g.norm == "max-aniso":
        nu = np.array(g.weights)
        t_full = float(np.min(np.maximum(R**nu - np.abs(x), 0.0) ** (1.0 / nu)))
        t_empty = float(np.max((R**nu + np.abs(x)) ** (1.0 / nu)))
        knots = sorted(
            set(
                [R]
                + [float(np.maximum(R ** nu[i] - abs(x[i]), 0.0) ** (1.0 / nu[i])) for i in range(g.n)]
                + [float((R ** nu[i] + abs(x[i])) ** (1.0 / nu[i])) for i in range(g.n)]
            )
        )
    else:
        t_full, t_empty = max(R - d, 0.0), R + d
        knots = [max(R - d, 1e-12), R, R + d]

    if t_full <= 0:
        t_full = min(R, d) * 1e-6

    sigma_full = g.sigma

    def integrand(t: np.ndarray) -> np.ndarray:
        k2 = rho.value(t) * t ** (-g.Q)
        m0 = np.where(t < R, sigma_full, 0.0)
        return k2 * (m_x(t) - m0)

    res = improper_power_integral(
        integrand, g.Q, t_full * (1 - 1e-12), t_empty * (1 + 1e-12),
        intervals=max(64, plan.radial_intervals * 4), tol=plan.tol,
        knots=[k for k in knots if t_full < k < t_empty],
        what="cancellation integral",
    )
    return float(res.value)


# ----------------------------------------------------------------------------
# grid convolution and the convolution-norm inequality
# ----------------------------------------------------------------------------


def grid_convolve(fg: GridFunction, hg: GridFunction) -> GridFunction:
    """Direct (non-FFT) discrete convolution of two grid functions."""
    if fg.g.law != LAW_ABELIAN:
        raise ConfigurationError("grid convolution needs an abelian group")
    if fg.res != hg.res or fg.L != hg.L:
        raise InputError("grids must match")
    if fg.g.n == 1:
        vals = np.convolve(fg.values, hg.values) * fg.cell_volume
    elif fg.g.n == 2:
        vals = convolve2d(fg.values, hg.values, mode="full") * fg.cell_volume
    else:
        raise ConfigurationError("grid convolution implemented for n <= 2")
    # padded output grid: same cell size, support doubled
    res = tuple(2 * r - 1 for r in fg.res)
    L_out = fg.L * (2 * fg.res[0] - 1) / fg.res[0]
    return GridFunction(fg.g, L_out, res, vals)


def convolve_young(
    f: TestFunction,
    h: TestFunction,
    g: GroupDescriptor,
    p: float,
    q: float,
    p1: float,
    plan: QuadraturePlan = DEFAULT_PLAN,
    L: float = 4.0,
    res: int = 64,
) -> dict:
    """Both sides of the convolution-norm inequality on a sampling grid.

    lhs = ||h * f||_q over the padded output grid, rhs = ||f||_p ||h||_p1,
    all three norms computed from the same cell-centred samples; requires
    1/q + 1 = 1/p + 1/p1.
    """
    for v in (p, q, p1):
        if v < 1:
            raise InputError("exponents must be >= 1")
    lhs_rel = (1.0 / q if math.isfinite(q) else 0.0) + 1.0
    rhs_rel = (1.0 / p if math.isfinite(p) else 0.0) + (1.0 / p1 if math.isfinite(p1) else 0.0)
    if abs(lhs_rel - rhs_rel) > 1e-9:
        raise InputError("exponents must satisfy 1/q + 1 = 1/p + 1/p1")
    fg = sample_to_grid(f, g, L, res)
    hg = sample_to_grid(h, g, L, res)
    conv = grid_convolve(fg, hg)
    lhs = conv.lebesgue_norm(q)
    rhs = fg.lebesgue_norm(p) * hg.lebesgue_norm(p1)
    return {"lhs": lhs, "rhs": rhs, "L": L, "res": res}

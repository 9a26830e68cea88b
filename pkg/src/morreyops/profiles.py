"""Radial profile catalog and numerical checkers for the operator hypotheses.

Profiles are positive functions on (0, inf) used as kernel shapes, space
weights and comparison envelopes.  The catalog holds plain powers, knee'd
powers (a power with a different exponent below a knot), positive sums of
powers, and tabulated profiles with log-linear interpolation.

Each hypothesis a boundedness statement imposes on profiles is available as a
named condition in `check_condition`; conditions are evaluated on a log grid
and report the empirical constant (the sup of LHS/RHS).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ._quadcore import improper_power_integral, simpson_on_blocks
from .errors import DivergenceError, InputError
from .plan import DEFAULT_PLAN, QuadraturePlan

KIND_POWER = "power"
KIND_POWER_TRUNCATED = "power-truncated"
KIND_POWER_SUM = "power-sum"
KIND_TABLE = "table"

# log grid used by every condition checker
_GRID_LO, _GRID_HI, _GRID_N = 1e-3, 1e3, 241
# widened grid used to detect boundary growth that the core grid misses
_EXT_FACTOR = 10.0**1.5
OVERFLOW_GUARD = 1e12


@dataclass(frozen=True)
class RadialProfile:
    """A positive radial function from the parametric catalog.

    power:            c * r^beta
    power-truncated:  c * r^beta * min(r/knot, 1)^shift   (knee at `knot`)
    power-sum:        sum_i c_i * r^(beta_i),  c_i > 0
    table:            log-linear interpolation of (r, value) pairs, extended
                      beyond the table with the boundary log-log slopes
    """

    kind: str
    c: float = 1.0
    beta: float = 0.0
    knot: float = 1.0
    shift: float = 0.0
    terms: tuple[tuple[float, float], ...] = ()
    table_r: tuple[float, ...] = ()
    table_v: tuple[float, ...] = ()
    spec: str = field(default="", compare=False)

    def __post_init__(self):
        if self.kind in (KIND_POWER, KIND_POWER_TRUNCATED) and self.c <= 0:
            raise InputError("profile amplitude must be positive")
        if self.kind == KIND_POWER_TRUNCATED and self.knot <= 0:
            raise InputError("truncation knot must be positive")
        if self.kind == KIND_POWER_SUM:
            if not self.terms or any(c <= 0 for c, _ in self.terms):
                raise InputError("power-sum terms need positive coefficients")
        if self.kind == KIND_TABLE:
            r = np.asarray(self.table_r)
            v = np.asarray(self.table_v)
            if len(r) < 2 or np.any(np.diff(r) <= 0) or np.any(r <= 0) or np.any(v <= 0):
                raise InputError("table needs >= 2 strictly increasing positive rows")

    def value(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        if np.any(r < 0):
            raise InputError("profiles are defined on r > 0")
        if self.kind == KIND_POWER:
            return self.c * r**self.beta
        if self.kind == KIND_POWER_TRUNCATED:
            return self.c * r**self.beta * np.minimum(r / self.knot, 1.0) ** self.shift
        if self.kind == KIND_POWER_SUM:
            out = np.zeros_like(r)
            for c, b in self.terms:
                out = out + c * r**b
            return out
        # table: interpolate log(v) against log(r), linear slope extension
        lr = np.log(np.maximum(r, 1e-300))
        tr = np.log(np.asarray(self.table_r))
        tv = np.log(np.asarray(self.table_v))
        out = np.interp(lr, tr, tv)
        lo_slope = (tv[1] - tv[0]) / (tr[1] - tr[0])
        hi_slope = (tv[-1] - tv[-2]) / (tr[-1] - tr[-2])
        out = np.where(lr < tr[0], tv[0] + lo_slope * (lr - tr[0]), out)
        out = np.where(lr > tr[-1], tv[-1] + hi_slope * (lr - tr[-1]), out)
        return np.exp(out)

    __call__ = value

    def knots(self) -> tuple[float, ...]:
        """Radii where the formula switches (quadrature blocks align here)."""
        if self.kind == KIND_POWER_TRUNCATED:
            return (self.knot,)
        if self.kind == KIND_TABLE:
            return tuple(self.table_r)
        return ()

    def doubling_bound(self) -> Optional[float]:
        """Analytic doubling constant, when the catalog knows one."""
        if self.kind == KIND_POWER:
            return 2.0 ** abs(self.beta)
        if self.kind == KIND_POWER_TRUNCATED:
            return 2.0 ** max(abs(self.beta), abs(self.beta + self.shift))
        if self.kind == KIND_POWER_SUM:
            return 2.0 ** max(abs(b) for _, b in self.terms)
        return None

    def surjective(self) -> Optional[bool]:
        """True when certified onto (0, inf); None for non-certified kinds."""
        if self.kind == KIND_POWER:
            return self.beta < 0 and self.c > 0
        if self.kind == KIND_POWER_TRUNCATED:
            return self.beta < 0 and self.beta + self.shift < 0
        if self.kind == KIND_POWER_SUM:
            return all(b < 0 for _, b in self.terms)
        return None


def power(c: float, beta: float) -> RadialProfile:
    return RadialProfile(KIND_POWER, c=c, beta=beta, spec=f"pow:c={c:g}:beta={beta:g}")


def power_truncated(c: float, beta: float, shift: float, knot: float = 1.0) -> RadialProfile:
    return RadialProfile(
        KIND_POWER_TRUNCATED,
        c=c,
        beta=beta,
        shift=shift,
        knot=knot,
        spec=f"powcut:c={c:g}:beta={beta:g}:m={shift:g}:knot={knot:g}",
    )


def power_sum(terms: Sequence[tuple[float, float]]) -> RadialProfile:
    t = tuple((float(c), float(b)) for c, b in terms)
    body = ",".join(f"{c:g}*{b:g}" for c, b in t)
    return RadialProfile(KIND_POWER_SUM, terms=t, spec=f"powsum:t={body}")


def profile_power(p: RadialProfile, e: float) -> RadialProfile:
    """The profile r -> p(r)^e, for the kinds closed under powers."""
    if e == 1.0:
        return p
    if p.kind == KIND_POWER:
        return power(p.c**e, p.beta * e)
    if p.kind == KIND_POWER_TRUNCATED and e > 0:
        return power_truncated(p.c**e, p.beta * e, p.shift * e, p.knot)
    raise InputError(f"cannot raise a {p.kind} profile to a power")


def table_profile(r: Sequence[float], v: Sequence[float], spec: str = "") -> RadialProfile:
    return RadialProfile(
        KIND_TABLE, table_r=tuple(float(x) for x in r), table_v=tuple(float(x) for x in v),
        spec=spec or "table:<inline>",
    )


def parse_profile(spec: str) -> RadialProfile:
    """Parse "pow:c=1:beta=-1", "powcut:...", "powsum:t=...", "table:@file.csv"."""
    s = spec.strip()
    head, _, rest = s.partition(":")
    kv = {}
    if head in ("pow", "powcut"):
        for part in rest.split(":"):
            if part:
                k, _, v = part.partition("=")
                kv[k] = float(v)
    if head == "pow":
        return power(kv.get("c", 1.0), kv.get("beta", 0.0))
    if head == "powcut":
        return power_truncated(kv.get("c", 1.0), kv.get("beta", 0.0), kv.get("m", 1.0), kv.get("knot", 1.0))
    if head == "powsum":
        if not rest.startswith("t="):
            raise InputError(f"powsum spec needs t=...: {spec!r}")
        terms = []
        for item in rest[2:].split(","):
            c, _, b = item.partition("*")
            terms.append((float(c), float(b)))
        return power_sum(terms)
    if head == "table":
        if not rest.startswith("@"):
            raise InputError(f"table spec needs @file: {spec!r}")
        rows = np.loadtxt(rest[1:], delimiter=",", ndmin=2)
        return table_profile(rows[:, 0], rows[:, 1], spec=s)
    raise InputError(f"unrecognised profile spec: {spec!r}")


# ----------------------------------------------------------------------------
# Doubling constant
# ----------------------------------------------------------------------------


def doubling_constant(p: RadialProfile, r_grid=None) -> float:
    """Empirical doubling constant: sup of max(p(r)/p(s), p(s)/p(r)) over
    sampled pairs with r/s in [1/2, 2].

    The default grid is geometric with 8 points per octave, so exact factor-2
    pairs are present and power profiles report 2^|beta| exactly.
    """
    if r_grid is None:
        r_grid = np.logspace(-3, 3, 8 * 6 + 1)
    r_grid = np.asarray(r_grid, dtype=float)
    if r_grid.size == 0:
        raise InputError("doubling grid must be nonempty")
    factors = 2.0 ** np.linspace(-1.0, 1.0, 17)
    pr = p.value(r_grid)
    if np.any(pr <= 0):
        raise InputError("profile non-positive on the doubling grid")
    best = 1.0
    for f in factors:
        ps = p.value(r_grid * f)
        if np.any(ps <= 0):
            raise InputError("profile non-positive on the doubling grid")
        ratio = np.maximum(pr / ps, ps / pr)
        best = max(best, float(ratio.max()))
    return best


# ----------------------------------------------------------------------------
# Condition catalog
# ----------------------------------------------------------------------------

COND_RHO_BESSEL_INTEGRABLE = "rho-bessel-integrable"   # int_0^1 rho(t) t^(Q-gamma-1) dt < inf
COND_RHO_FRAC_INTEGRABLE = "rho-frac-integrable"       # int_0^1 rho(t)/t dt < inf
COND_RHO_TAIL_DECAY = "rho-tail-decay"                 # int_r^inf rho/t^2 <= C rho(r)/r
COND_RHO_KERNEL_LIPSCHITZ = "rho-kernel-lipschitz"     # pairwise kernel Lipschitz bound
COND_PHI_TAIL_POWER = "phi-tail-power"                 # int_r^inf phi^p/t <= C phi(r)^p
COND_BALANCE_BESSEL = "phi-rho-balance-bessel"         # two-term bound by phi^(p/q), weight t^(Q-gamma)
COND_BALANCE_FRAC = "phi-rho-balance-frac"             # two-term bound by phi^(p/q), weight 1
COND_BALANCE_CAMPANATO = "phi-rho-psi-campanato"       # two-term bound by psi
COND_PHI_TAIL_INTEGRABLE = "phi-tail-integrable"       # int_1^inf phi/t dt < inf
COND_OMEGA_KERNEL_INCLUSION = "omega-kernel-inclusion" # int_0^R t^((a-Q)p2+Q-1) <= C w^p2 R^Q
COND_PHI_MORREY_MONOTONE = "phi-morrey-monotone"       # phi down, t^(Q/p) phi up
COND_PHI_SURJECTIVE = "phi-surjective"
COND_DOUBLING = "doubling"
COND_POWER_ENVELOPE = "power-envelope"                 # p(r) <= C r^exponent for all r

ALL_CONDITIONS = (
    COND_RHO_BESSEL_INTEGRABLE,
    COND_RHO_FRAC_INTEGRABLE,
    COND_RHO_TAIL_DECAY,
    COND_RHO_KERNEL_LIPSCHITZ,
    COND_PHI_TAIL_POWER,
    COND_BALANCE_BESSEL,
    COND_BALANCE_FRAC,
    COND_BALANCE_CAMPANATO,
    COND_PHI_TAIL_INTEGRABLE,
    COND_OMEGA_KERNEL_INCLUSION,
    COND_PHI_MORREY_MONOTONE,
    COND_PHI_SURJECTIVE,
    COND_DOUBLING,
    COND_POWER_ENVELOPE,
)


@dataclass(frozen=True)
class ConditionResult:
    condition: str
    holds: bool
    constant: float
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "condition": self.condition,
            "holds": bool(self.holds),
            "constant": float(self.constant),
            "note": self.note,
        }


def _grid() -> np.ndarray:
    """Core log grid plus a widened margin; returns (radii, core mask)."""
    core = np.logspace(math.log10(_GRID_LO), math.log10(_GRID_HI), _GRID_N)
    ext = np.logspace(
        math.log10(_GRID_LO / _EXT_FACTOR), math.log10(_GRID_HI * _EXT_FACTOR), 49
    )
    allg = np.unique(np.concatenate([core, ext]))
    mask = (allg >= _GRID_LO * (1 - 1e-12)) & (allg <= _GRID_HI * (1 + 1e-12))
    return allg, mask


def _grid_integrals(
    h,
    weight_exp: float,
    grid: np.ndarray,
    plan: QuadraturePlan,
    knots,
    what: str,
    need_inner: bool,
    need_tail: bool,
) -> tuple[Optional[np.ndarray], Optional[np.ndarray]]:
    """Cumulative integral of h(t) t^(weight_exp-1) dt at every grid point.

    Returns (inner, tail) with inner[i] = int_0^{grid[i]} and
    tail[i] = int_{grid[i]}^inf.  Divergence of the inner part propagates
    (named after the condition); a divergent tail yields +inf entries.
    """
    u = np.log(grid)
    ku = sorted(math.log(k) for k in knots if grid[0] < k < grid[-1])
    edges = np.unique(np.concatenate([u, np.asarray(ku)])) if ku else u

    def F(uu: np.ndarray) -> np.ndarray:
        t = np.exp(uu)
        return np.asarray(h(t), dtype=float) * np.exp(weight_exp * uu)

    m = max(4, plan.radial_intervals - plan.radial_intervals % 2)
    fine, _ = simpson_on_blocks(F, edges, m)
    cum = np.concatenate([[0.0], np.cumsum(fine)])
    at_grid = cum[np.searchsorted(edges, u)]

    inner = tail = None
    if need_inner:
        base = improper_power_integral(
            h, weight_exp, 0.0, float(grid[0]),
            intervals=plan.radial_intervals, tol=plan.tol, knots=knots, what=what,
        ).value
        inner = base + at_grid
    if need_tail:
        try:
            tail_base = improper_power_integral(
                h, weight_exp, float(grid[-1]), math.inf,
                intervals=plan.radial_intervals, tol=plan.tol, knots=knots, what=what,
            ).value
        except DivergenceError:
            tail_base = math.inf
        tail = (at_grid[-1] - at_grid) + tail_base
    return inner, tail


def _verdict(cond: str, ratios: np.ndarray, core_mask: np.ndarray) -> ConditionResult:
    """Sup of LHS/RHS ratios; holds iff finite, under the guard and stable
    when the grid range is widened by 1.5 decades each way."""
    if np.any(~np.isfinite(ratios)):
        return ConditionResult(cond, False, math.inf, "ratio not finite on the grid")
    sup_core = float(ratios[core_mask].max())
    sup_all = float(ratios.max())
    ok = sup_all <= OVERFLOW_GUARD and sup_all <= 1.3 * sup_core + 1e-12
    note = "" if ok else ("exceeds overflow guard" if sup_all > OVERFLOW_GUARD else "grows at the grid boundary")
    return ConditionResult(cond, ok, sup_all, note)


def check_condition(
    p: RadialProfile,
    cond: str,
    params: Optional[dict] = None,
    plan: QuadraturePlan = DEFAULT_PLAN,
) -> ConditionResult:
    """Evaluate one named profile condition.

    `p` is the primary profile (rho for rho-conditions, phi for phi-ones);
    companion profiles and exponents come through `params` (keys: Q, gamma,
    alpha, p, q, p2, rho, phi, psi as needed).  The reported constant is the
    sup of LHS/RHS over a log grid, with a widened grid guarding against
    boundary growth; `holds` means finite, below the overflow guard and
    stable under that widening.
    """
    pr = dict(params or {})
    grid, core = _grid()

    if cond == COND_RHO_BESSEL_INTEGRABLE:
        Q, gamma = float(pr["Q"]), float(pr["gamma"])
        try:
            val = improper_power_integral(
                p.value, Q - gamma, 0.0, 1.0,
                intervals=plan.radial_intervals, tol=plan.tol, knots=p.knots(), what=cond,
            ).value
        except DivergenceError:
            return ConditionResult(cond, False, math.inf, "small-scale integral diverges")
        return ConditionResult(cond, True, val)

    if cond == COND_RHO_FRAC_INTEGRABLE:
        try:
            val = improper_power_integral(
                p.value, 0.0, 0.0, 1.0,
                intervals=plan.radial_intervals, tol=plan.tol, knots=p.knots(), what=cond,
            ).value
        except DivergenceError:
            return ConditionResult(cond, False, math.inf, "small-scale integral diverges")
        return ConditionResult(cond, True, val)

    if cond == COND_RHO_TAIL_DECAY:
        _, tail = _grid_integrals(p.value, -1.0, grid, plan, p.knots(), cond, False, True)
        return _verdict(cond, tail * grid / p.value(grid), core)

    if cond == COND_RHO_KERNEL_LIPSCHITZ:
        Q = float(pr["Q"])
        rng = np.random.default_rng(int(pr.get("seed", plan.mc_seed)))
        r = np.exp(rng.uniform(math.log(_GRID_LO), math.log(_GRID_HI), 1000))
        s = r * 2.0 ** rng.uniform(-1.0, 1.0, 1000)
        keep = np.abs(r - s) > 1e-9 * s
        r, s = r[keep], s[keep]
        lhs = np.abs(p.value(r) / r**Q - p.value(s) / s**Q)
        rhs = np.abs(r - s) * p.value(s) / s ** (Q + 1)
        sup = float((lhs / rhs).max())
        return ConditionResult(cond, math.isfinite(sup) and sup <= OVERFLOW_GUARD, sup)

    if cond == COND_PHI_TAIL_POWER:
        pp = float(pr["p"])
        _, tail = _grid_integrals(
            lambda t: p.value(t) ** pp, 0.0, grid, plan, p.knots(), cond, False, True
        )
        return _verdict(cond, tail / p.value(grid) ** pp, core)

    if cond in (COND_BALANCE_BESSEL, COND_BALANCE_FRAC):
        rho: RadialProfile = pr["rho"]
        phi: RadialProfile = pr.get("phi", p)
        pp, qq = float(pr["p"]), float(pr["q"])
        w = float(pr["Q"]) - float(pr["gamma"]) if cond == COND_BALANCE_BESSEL else 0.0
        knots = tuple(rho.knots()) + tuple(phi.knots())
        inner, _ = _grid_integrals(rho.value, w, grid, plan, knots, cond, True, False)
        _, tail = _grid_integrals(
            lambda t: rho.value(t) * phi.value(t), w, grid, plan, knots, cond, False, True
        )
        phi_g = phi.value(grid)
        return _verdict(cond, (phi_g * inner + tail) / phi_g ** (pp / qq), core)

    if cond == COND_BALANCE_CAMPANATO:
        rho: RadialProfile = pr["rho"]
        phi: RadialProfile = pr.get("phi", p)
        psi: RadialProfile = pr["psi"]
        knots = tuple(rho.knots()) + tuple(phi.knots())
        _, phi_tail = _grid_integrals(phi.value, 0.0, grid, plan, knots, cond, False, True)
        inner, _ = _grid_integrals(rho.value, 0.0, grid, plan, knots, cond, True, False)
        _, second = _grid_integrals(
            lambda t: rho.value(t) * phi.value(t), -1.0, grid, plan, knots, cond, False, True
        )
        return _verdict(cond, (phi_tail * inner + grid * second) / psi.value(grid), core)

    if cond == COND_PHI_TAIL_INTEGRABLE:
        try:
            val = improper_power_integral(
                p.value, 0.0, 1.0, math.inf,
                intervals=plan.radial_intervals, tol=plan.tol, knots=p.knots(), what=cond,
            ).value
        except DivergenceError:
            return ConditionResult(cond, False, math.inf, "tail integral diverges")
        return ConditionResult(cond, True, val)

    if cond == COND_OMEGA_KERNEL_INCLUSION:
        Q, alpha, p2 = float(pr["Q"]), float(pr["alpha"]), float(pr["p2"])
        a2 = (alpha - Q) * p2 + Q
        if a2 <= 0:
            raise DivergenceError(cond, "kernel power not integrable at the origin")
        ratios = (grid**a2 / a2) / (p.value(grid) ** p2 * grid**Q)
        return _verdict(cond, ratios, core)

    if cond == COND_PHI_MORREY_MONOTONE:
        Q, pp = float(pr["Q"]), float(pr["p"])
        v = p.value(grid)
        up = v * grid ** (Q / pp)
        slack = 1e-9
        ok = bool(np.all(v[1:] <= v[:-1] * (1 + slack)) and np.all(up[1:] >= up[:-1] * (1 - slack)))
        return ConditionResult(cond, ok, 1.0 if ok else math.inf)

    if cond == COND_POWER_ENVELOPE:
        e = float(pr["exponent"])
        return _verdict(cond, p.value(grid) / grid**e, core)

    if cond == COND_PHI_SURJECTIVE:
        cert = p.surjective()
        if cert is None:
            return ConditionResult(cond, False, math.inf, "not certified for this kind")
        return ConditionResult(cond, bool(cert), 1.0 if cert else math.inf)

    if cond == COND_DOUBLING:
        c = doubling_constant(p)
        return ConditionResult(cond, c <= OVERFLOW_GUARD, c)

    raise InputError(f"unknown condition id: {cond!r}")

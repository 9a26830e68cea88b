"""Runs each boundedness statement as a numerical experiment.

A case names a statement, a group, parameters, profiles and a family of test
functions.  Running it checks every hypothesis the statement imposes, computes
the two sides of the inequality for each test function, and records the
empirical constant (the largest LHS/RHS ratio).  The constants in the
statements are existential, so verification is non-regression: the bundled
suite pins each case's constant and later runs must stay at or below it.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from typing import Callable, Optional

import numpy as np

from . import functions as fns
from . import operators as ops
from . import spaces
from .errors import InputError
from .group import GroupDescriptor, parse_group
from .kernels import (
    KernelParams,
    admissible_p1_interval,
    kernel_gen_morrey_norm,
    kernel_lebesgue_norm,
    kernel_morrey_norm,
    sandwich_check,
)
from .plan import QuadraturePlan
from .profiles import (
    COND_BALANCE_BESSEL,
    COND_BALANCE_CAMPANATO,
    COND_BALANCE_FRAC,
    COND_DOUBLING,
    COND_PHI_MORREY_MONOTONE,
    COND_PHI_SURJECTIVE,
    COND_PHI_TAIL_INTEGRABLE,
    COND_PHI_TAIL_POWER,
    COND_POWER_ENVELOPE,
    COND_RHO_BESSEL_INTEGRABLE,
    COND_RHO_FRAC_INTEGRABLE,
    COND_RHO_KERNEL_LIPSCHITZ,
    COND_RHO_TAIL_DECAY,
    ConditionResult,
    RadialProfile,
    check_condition,
    parse_profile,
    profile_power,
)

THEOREM_IDS = (
    "kernel-membership",
    "young",
    "maximal",
    "br-1",
    "br-2",
    "br-3",
    "gbr",
    "olsen-gbr",
    "gfrac",
    "olsen-gfrac",
    "olsen-br",
    "campanato",
)


@dataclass
class TheoremCase:
    """One runnable experiment; see `from_dict` for the JSON schema."""

    theorem: str
    group: str
    params: dict
    functions: list[str] = field(default_factory=list)
    plan: QuadraturePlan = field(default_factory=QuadraturePlan)
    case_id: str = ""

    def __post_init__(self):
        if self.theorem not in THEOREM_IDS:
            raise InputError(f"unknown theorem id {self.theorem!r}")
        if not self.case_id:
            self.case_id = self.theorem

    @classmethod
    def from_dict(cls, d: dict) -> "TheoremCase":
        plan = QuadraturePlan.from_dict(d["plan"]) if "plan" in d else QuadraturePlan()
        return cls(
            theorem=d["theorem"],
            group=d["group"],
            params=dict(d.get("params", {})),
            functions=list(d.get("functions", [])),
            plan=plan,
            case_id=d.get("case_id", d["theorem"]),
        )

    def to_dict(self) -> dict:
        return {
            "theorem": self.theorem,
            "case_id": self.case_id,
            "group": self.group,
            "params": self.params,
            "functions": self.functions,
            "plan": self.plan.to_dict(),
        }


@dataclass
class VerificationReport:
    case: dict
    derived: dict
    hypotheses: list[dict]
    entries: list[dict]
    max_ratio: float
    regression_bound: Optional[object]
    passed: bool
    note: str
    runtime_s: float

    def to_dict(self) -> dict:
        return {
            "case": self.case,
            "derived": self.derived,
            "hypotheses": self.hypotheses,
            "entries": self.entries,
            "max_ratio": self.max_ratio,
            "regression_bound": self.regression_bound,
            "passed": bool(self.passed),
            "note": self.note,
            "runtime_s": self.runtime_s,
        }


def load_regression_bounds() -> dict:
    ref = resources.files("morreyops").joinpath("data/regression_bounds.json")
    try:
        return json.loads(ref.read_text())
    except FileNotFoundError:
        return {}


def _prof(case: TheoremCase, key: str) -> RadialProfile:
    spec = case.params.get(key)
    if spec is None:
        raise InputError(f"case {case.case_id!r} needs a {key!r} profile")
    return parse_profile(spec) if isinstance(spec, str) else spec


def _power_beta(p: RadialProfile, what: str) -> float:
    if p.kind != "power":
        raise InputError(f"{what} must be a plain power profile for this statement")
    return p.beta


class _Gate:
    """Collects hypothesis results; any failure flips the case to not-passed."""

    def __init__(self):
        self.rows: list[dict] = []
        self.ok = True
        self.first_failure = ""

    def add(self, res: ConditionResult, label: str = ""):
        row = res.to_dict()
        if label:
            row["label"] = label
        self.rows.append(row)
        if not res.holds and self.ok:
            self.ok = False
            self.first_failure = label or res.condition

    def require(self, name: str, holds: bool, value: float = math.nan):
        self.rows.append({"condition": name, "holds": bool(holds), "constant": value, "note": ""})
        if not holds and self.ok:
            self.ok = False
            self.first_failure = name


def _norm_grid_radii(plan: QuadraturePlan) -> np.ndarray:
    return spaces.norm_sup_radii(plan)


def _young_pairs(g: GroupDescriptor, seed: int, n_pairs: int) -> list[tuple]:
    rng = np.random.default_rng(seed)

    def pick() -> fns.TestFunction:
        kind = rng.integers(0, 4)
        if kind == 0:
            return fns.ball_indicator(float(rng.uniform(0.5, 2.0)))
        if kind == 1:
            return fns.gaussian(float(rng.uniform(0.5, 1.5)))
        if kind == 2:
            z = rng.uniform(-1.0, 1.0, g.n)
            return fns.shifted(fns.ball_indicator(float(rng.uniform(0.5, 1.5))), tuple(z))
        return fns.combo(
            [(float(rng.uniform(0.2, 1.0)), fns.ball_indicator(float(rng.uniform(0.5, 1.5)))),
             (float(rng.uniform(0.2, 1.0)), fns.gaussian(float(rng.uniform(0.5, 1.2))))]
        )

    return [(pick(), pick()) for _ in range(n_pairs)]


def _wrap_weighted(g, W: fns.TestFunction, op: Callable[[np.ndarray], np.ndarray]):
    return lambda pts: W.eval(g, pts) * op(pts)


# ----------------------------------------------------------------------------
# per-theorem runners: each returns (gate, derived, entries)
# ----------------------------------------------------------------------------


def _run_kernel_membership(case: TheoremCase, g: GroupDescriptor):
    pr = case.params
    alpha, gamma, p1 = float(pr["alpha"]), float(pr["gamma"]), float(pr["p1"])
    radii = [float(v) for v in pr.get("R", (0.5, 1.0, 2.0))]
    gate = _Gate()
    gate.require("alpha-range", 0 < alpha < g.Q, alpha)
    gate.require("gamma-positive", gamma > 0, gamma)
    k = KernelParams(g, alpha, gamma)
    lo, hi = admissible_p1_interval(k) if gamma > 0 else (math.nan, math.nan)
    gate.require("p1-admissible", lo < p1 < hi, p1)
    entries = []
    if not gate.ok:
        return gate, {"interval": [lo, hi]}, entries
    for R in radii:
        sw = sandwich_check(k, p1, R, case.plan)
        entries.append(
            {
                "R": R,
                "lhs": sw.norm_p1_power,
                "rhs": sw.dyadic_value,
                "ratio": sw.norm_p1_power / sw.dyadic_value,
                "lower_ok": sw.lower_ok,
                "upper_ok": sw.upper_ok,
                "c_lower": sw.c_lower,
                "c_upper": sw.c_upper,
            }
        )
        gate.require(f"sandwich@R={R:g}", sw.lower_ok and sw.upper_ok)
    return gate, {"interval": [lo, hi]}, entries


def _run_young(case: TheoremCase, g: GroupDescriptor):
    pr = case.params
    p, q, p1 = float(pr["p"]), float(pr["q"]), float(pr["p1"])
    gate = _Gate()
    gate.require("exponent-relation", abs(1 / q + 1 - 1 / p - 1 / p1) < 1e-9)
    entries = []
    if not gate.ok:
        return gate, {}, entries
    pairs = _young_pairs(g, case.plan.mc_seed, int(pr.get("n_pairs", 20)))
    for f, h in pairs:
        out = ops.convolve_young(f, h, g, p, q, p1, case.plan,
                                 L=float(pr.get("L", 4.0)), res=int(pr.get("res", 64)))
        entries.append({"f": f.spec, "h": h.spec, "lhs": out["lhs"], "rhs": out["rhs"],
                        "ratio": out["lhs"] / out["rhs"] if out["rhs"] > 0 else math.inf})
    return gate, {}, entries


def _lhs_rhs_entry(spec, lhs, rhs):
    return {"function": spec, "lhs": float(lhs), "rhs": float(rhs),
            "ratio": float(lhs / rhs) if rhs > 0 else math.inf}


def _run_maximal(case: TheoremCase, g: GroupDescriptor):
    pr = case.params
    p = float(pr["p"])
    phi = _prof(case, "phi")
    gate = _Gate()
    gate.require("p-range", 1 < p < math.inf, p)
    gate.add(check_condition(phi, COND_PHI_MORREY_MONOTONE, {"Q": g.Q, "p": p}, case.plan), "phi")
    gate.add(check_condition(phi, COND_DOUBLING, {}, case.plan), "phi")
    entries = []
    if not gate.ok:
        return gate, {}, entries
    for spec in case.functions:
        f = fns.parse_function(spec)
        M = ops.MaximalOperator(f, g, plan=case.plan)
        lhs = spaces.gen_morrey_norm(M, g, p, phi, plan=case.plan).value
        rhs = spaces.gen_morrey_norm(f, g, p, phi, plan=case.plan).value
        entries.append(_lhs_rhs_entry(spec, lhs, rhs))
    return gate, {}, entries


def _bessel_riesz_common(case: TheoremCase, g: GroupDescriptor, gate: _Gate):
    pr = case.params
    alpha, gamma, p = float(pr["alpha"]), float(pr["gamma"]), float(pr["p"])
    phi = _prof(case, "phi")
    beta = _power_beta(phi, "phi")
    gate.require("alpha-range", 0 < alpha < g.Q, alpha)
    gate.require("gamma-positive", gamma > 0, gamma)
    gate.require("p-range", 1 < p < math.inf, p)
    gate.add(check_condition(phi, COND_POWER_ENVELOPE, {"exponent": beta}, case.plan), "phi<=C r^beta")
    gate.require("beta-below-minus-alpha", beta < -alpha, beta)
    return alpha, gamma, p, phi, beta


def _derived_q_dual(beta: float, p1: float, p: float, Q: float) -> float:
    p1p = p1 / (p1 - 1.0)
    return beta * p1p * p / (beta * p1p + Q)


def _run_br(case: TheoremCase, g: GroupDescriptor, variant: int):
    pr = case.params
    gate = _Gate()
    alpha, gamma, p, phi, beta = _bessel_riesz_common(case, g, gate)
    k = KernelParams(g, alpha, gamma) if gate.ok else None
    lo, hi = admissible_p1_interval(k) if k is not None else (math.nan, math.nan)
    derived: dict = {}
    if variant in (1, 2):
        p1 = float(pr["p1"])
        gate.require("p1-admissible", lo < p1 < hi, p1)
        if variant == 2:
            p2 = float(pr["p2"])
            gate.require("p2-range", lo < p2 <= p1 and p2 >= 1, p2)
        q = _derived_q_dual(beta, p1, p, g.Q) if gate.ok else math.nan
    else:
        p2 = float(pr["p2"])
        gate.require("p2-range", lo < p2 < hi and p2 >= 1, p2)
        gate.require("beta-window", beta < -alpha < -g.Q - beta, beta)
        q = beta * p / (beta + g.Q - alpha) if gate.ok else math.nan
        omega = _prof(case, "omega")
        gate.add(check_condition(omega, COND_DOUBLING, {}, case.plan), "omega")
        gate.add(check_condition(omega, COND_POWER_ENVELOPE, {"exponent": -alpha}, case.plan),
                 "omega<=C r^-alpha")
    gate.require("q-range", gate.ok and p < q < math.inf, q)
    entries: list[dict] = []
    if not gate.ok:
        return gate, {"q": q}, entries
    psi = profile_power(phi, p / q)
    derived = {"q": q, "psi": psi.spec}
    if variant == 1:
        knorm = kernel_lebesgue_norm(k, p1, case.plan).value
        derived["kernel_norm"] = {"kind": "global", "p1": p1, "value": knorm}
    elif variant == 2:
        knorm = kernel_morrey_norm(k, p2, p1, case.plan).value
        derived["kernel_norm"] = {"kind": "ball-power", "p2": p2, "p1": p1, "value": knorm}
    else:
        res = kernel_gen_morrey_norm(k, p2, omega, case.plan)
        gate.add(res.inclusion, "omega kernel inclusion")
        gate.require("kernel-in-weighted-class", res.bounded)
        knorm = res.value
        derived["kernel_norm"] = {"kind": "ball-profile", "p2": p2, "value": knorm}
    if not gate.ok:
        return gate, derived, entries
    for spec in case.functions:
        f = fns.parse_function(spec)
        op = ops.bessel_riesz_operator(f, g, k, case.plan)
        lhs = spaces.gen_morrey_norm(op, g, q, psi, plan=case.plan).value
        rhs = knorm * spaces.gen_morrey_norm(f, g, p, phi, plan=case.plan).value
        entries.append(_lhs_rhs_entry(spec, lhs, rhs))
    return gate, derived, entries


def _profile_operator_case(case: TheoremCase, g: GroupDescriptor, fractional: bool):
    """Shared gate for the profile-kernel statements (with or without damping)."""
    pr = case.params
    gate = _Gate()
    p = float(pr["p"])
    rho = _prof(case, "rho")
    phi = _prof(case, "phi")
    gate.require("p-range", 1 < p < math.inf, p)
    gate.add(check_condition(rho, COND_DOUBLING, {}, case.plan), "rho")
    gate.add(check_condition(phi, COND_DOUBLING, {}, case.plan), "phi")
    gate.add(check_condition(phi, COND_PHI_SURJECTIVE, {}, case.plan), "phi")
    gate.add(check_condition(phi, COND_PHI_TAIL_POWER, {"p": p}, case.plan), "phi tail")
    if fractional:
        gate.add(check_condition(rho, COND_RHO_FRAC_INTEGRABLE, {}, case.plan), "rho near 0")
    else:
        gamma = float(pr["gamma"])
        gate.require("gamma-positive", gamma > 0, gamma)
        gate.add(
            check_condition(rho, COND_RHO_BESSEL_INTEGRABLE, {"Q": g.Q, "gamma": gamma}, case.plan),
            "rho near 0",
        )
    return gate, p, rho, phi


def _balance_gate(case, g, gate, rho, phi, p, q, fractional: bool):
    cond = COND_BALANCE_FRAC if fractional else COND_BALANCE_BESSEL
    params = {"rho": rho, "phi": phi, "p": p, "q": q}
    if not fractional:
        params.update({"Q": g.Q, "gamma": float(case.params["gamma"])})
    gate.add(check_condition(phi, cond, params, case.plan), "profile balance")


def _run_profile_bound(case: TheoremCase, g: GroupDescriptor, fractional: bool):
    pr = case.params
    gate, p, rho, phi = _profile_operator_case(case, g, fractional)
    q = float(pr["q"])
    gate.require("q-range", p < q < math.inf, q)
    if gate.ok:
        _balance_gate(case, g, gate, rho, phi, p, q, fractional)
    entries: list[dict] = []
    if not gate.ok:
        return gate, {"q": q}, entries
    psi = profile_power(phi, p / q)
    for spec in case.functions:
        f = fns.parse_function(spec)
        if fractional:
            op = ops.gen_fractional_operator(f, g, rho, case.plan)
        else:
            op = ops.gen_bessel_riesz_operator(f, g, rho, float(pr["gamma"]), case.plan)
        lhs = spaces.gen_morrey_norm(op, g, q, psi, plan=case.plan).value
        rhs = spaces.gen_morrey_norm(f, g, p, phi, plan=case.plan).value
        entries.append(_lhs_rhs_entry(spec, lhs, rhs))
    return gate, {"q": q, "psi": psi.spec}, entries


def _run_olsen_profile(case: TheoremCase, g: GroupDescriptor, fractional: bool):
    pr = case.params
    gate, p, rho, phi = _profile_operator_case(case, g, fractional)
    p2 = float(pr["p2"])
    gate.require("p2-range", 1 < p < p2 < math.inf, p2)
    q = p * p2 / (p2 - p) if p2 > p else math.nan
    if gate.ok:
        _balance_gate(case, g, gate, rho, phi, p, q, fractional)
    W = fns.parse_function(pr["W"])
    entries: list[dict] = []
    if not gate.ok:
        return gate, {"q": q}, entries
    theta = profile_power(phi, p / p2)
    wnorm = spaces.gen_morrey_norm(W, g, p2, theta, plan=case.plan).value
    gate.require("weight-norm-finite", math.isfinite(wnorm), wnorm)
    derived = {"q": q, "weight_norm": wnorm, "W": W.spec}
    if not gate.ok:
        return gate, derived, entries
    for spec in case.functions:
        f = fns.parse_function(spec)
        if fractional:
            op = ops.gen_fractional_operator(f, g, rho, case.plan)
        else:
            op = ops.gen_bessel_riesz_operator(f, g, rho, float(pr["gamma"]), case.plan)
        lhs = spaces.gen_morrey_norm(_wrap_weighted(g, W, op), g, p, phi, plan=case.plan).value
        rhs = wnorm * spaces.gen_morrey_norm(f, g, p, phi, plan=case.plan).value
        entries.append(_lhs_rhs_entry(spec, lhs, rhs))
    return gate, derived, entries


def _run_olsen_br(case: TheoremCase, g: GroupDescriptor):
    pr = case.params
    gate = _Gate()
    alpha, gamma, p, phi, beta = _bessel_riesz_common(case, g, gate)
    gate.require("beta-window", beta < -alpha < -g.Q - beta, beta)
    k = KernelParams(g, alpha, gamma) if gate.ok else None
    lo, hi = admissible_p1_interval(k) if k is not None else (math.nan, math.nan)
    p2k = float(pr["p2_kernel"])
    gate.require("p2-kernel-range", lo < p2k < hi and p2k >= 1, p2k)
    omega = _prof(case, "omega")
    gate.add(check_condition(omega, COND_DOUBLING, {}, case.plan), "omega")
    gate.add(check_condition(omega, COND_POWER_ENVELOPE, {"exponent": -alpha}, case.plan),
             "omega<=C r^-alpha")
    q = beta * p / (beta + g.Q - alpha) if gate.ok else math.nan
    gate.require("q-range", gate.ok and p < q < math.inf, q)
    p2 = 1.0 / (1.0 / p - 1.0 / q) if gate.ok else math.nan
    gate.require("p2-range", gate.ok and p < p2 < math.inf, p2)
    entries: list[dict] = []
    if not gate.ok:
        return gate, {"q": q, "p2": p2}, entries
    W = fns.parse_function(pr["W"])
    theta = profile_power(phi, p / p2)
    wnorm = spaces.gen_morrey_norm(W, g, p2, theta, plan=case.plan).value
    derived = {"q": q, "p2": p2, "weight_norm": wnorm, "W": W.spec}
    for spec in case.functions:
        f = fns.parse_function(spec)
        op = ops.bessel_riesz_operator(f, g, k, case.plan)
        lhs = spaces.gen_morrey_norm(_wrap_weighted(g, W, op), g, p, phi, plan=case.plan).value
        rhs = wnorm * spaces.gen_morrey_norm(f, g, p, phi, plan=case.plan).value
        entries.append(_lhs_rhs_entry(spec, lhs, rhs))
    return gate, derived, entries


def _run_campanato(case: TheoremCase, g: GroupDescriptor):
    pr = case.params
    gate = _Gate()
    p = float(pr["p"])
    rho = _prof(case, "rho")
    phi = _prof(case, "phi")
    psi = _prof(case, "psi")
    gate.require("p-range", 1 < p < math.inf, p)
    gate.add(check_condition(rho, COND_RHO_FRAC_INTEGRABLE, {}, case.plan), "rho near 0")
    gate.add(check_condition(rho, COND_DOUBLING, {}, case.plan), "rho")
    gate.add(check_condition(rho, COND_RHO_TAIL_DECAY, {}, case.plan), "rho tail")
    gate.add(check_condition(rho, COND_RHO_KERNEL_LIPSCHITZ, {"Q": g.Q}, case.plan), "rho kernel")
    gate.add(check_condition(phi, COND_DOUBLING, {}, case.plan), "phi")
    gate.add(check_condition(phi, COND_PHI_TAIL_INTEGRABLE, {}, case.plan), "phi tail finite")
    gate.add(
        check_condition(phi, COND_BALANCE_CAMPANATO, {"rho": rho, "phi": phi, "psi": psi}, case.plan),
        "campanato balance",
    )
    entries: list[dict] = []
    if not gate.ok:
        return gate, {}, entries
    offset_spread = 0.0
    for spec in case.functions:
        f = fns.parse_function(spec)
        modop = ops.mod_fractional_operator(f, g, rho, case.plan)
        for convention in spaces.CONVENTIONS:
            lhs = spaces.campanato_norm(modop, g, p, psi, plan=case.plan,
                                        convention=convention).value
            rhs = spaces.campanato_norm(f, g, p, phi, plan=case.plan,
                                        convention=convention).value
            e = _lhs_rhs_entry(spec, lhs, rhs)
            e["convention"] = convention
            entries.append(e)
        pts = np.array([[x1, x2] for x1 in (-1.0, 0.0, 1.0) for x2 in (-1.0, 0.0, 1.0)])
        if g.n != 2:
            pts = np.zeros((1, g.n))
        plain = ops.gen_fractional_operator(f, g, rho, case.plan).apply(pts)
        modv = modop.apply(pts)
        diff = modv.values - plain.values
        scale = max(abs(float(np.mean(diff))), 1e-12)
        offset_spread = max(offset_spread, float(np.ptp(diff)) / scale)
    gate.require("modified-minus-plain-constant", offset_spread <= 1e-3, offset_spread)
    return gate, {"offset_spread": offset_spread}, entries


_RUNNERS: dict[str, Callable] = {
    "kernel-membership": _run_kernel_membership,
    "young": _run_young,
    "maximal": _run_maximal,
    "br-1": lambda c, g: _run_br(c, g, 1),
    "br-2": lambda c, g: _run_br(c, g, 2),
    "br-3": lambda c, g: _run_br(c, g, 3),
    "gbr": lambda c, g: _run_profile_bound(c, g, fractional=False),
    "gfrac": lambda c, g: _run_profile_bound(c, g, fractional=True),
    "olsen-gbr": lambda c, g: _run_olsen_profile(c, g, fractional=False),
    "olsen-gfrac": lambda c, g: _run_olsen_profile(c, g, fractional=True),
    "olsen-br": _run_olsen_br,
    "campanato": _run_campanato,
}


def _check_regression(case: TheoremCase, entries: list[dict], bound) -> tuple[float, bool, str]:
    ratios = [e["ratio"] for e in entries if "ratio" in e]
    max_ratio = max(ratios) if ratios else 0.0
    if not all(math.isfinite(r) for r in ratios):
        return math.inf, False, "non-finite ratio"
    if bound is None:
        return max_ratio, True, "no pinned bound; ratios finite"
    if isinstance(bound, dict):
        for conv, b in bound.items():
            worst = max((e["ratio"] for e in entries if e.get("convention") == conv), default=0.0)
            if worst > b:
                return max_ratio, False, f"regression under {conv}: {worst:.6g} > {b:.6g}"
        return max_ratio, True, ""
    return max_ratio, max_ratio <= float(bound), (
        "" if max_ratio <= float(bound) else f"regression: {max_ratio:.6g} > {bound:.6g}"
    )


def run_theorem(case: TheoremCase, bounds: Optional[dict] = None) -> VerificationReport:
    """Execute one case; hypothesis and validation failures produce a
    not-passed report rather than an exception (quadrature divergence and
    malformed input still raise)."""
    t0 = time.perf_counter()
    if bounds is None:
        bounds = load_regression_bounds()
    g = parse_group(case.group)
    try:
        gate, derived, entries = _RUNNERS[case.theorem](case, g)
    except (InputError,) as exc:
        return VerificationReport(
            case.to_dict(), {}, [], [], math.nan, None, False,
            f"validation failure: {exc}", time.perf_counter() - t0,
        )
    bound = bounds.get(case.case_id)
    max_ratio, within, note = _check_regression(case, entries, bound)
    passed = gate.ok and within
    if not gate.ok:
        note = f"hypothesis failed: {gate.first_failure}"
    return VerificationReport(
        case.to_dict(), derived, gate.rows, entries, max_ratio, bound, passed, note,
        time.perf_counter() - t0,
    )


def run_suite(
    cases: list[TheoremCase],
    threads: Optional[int] = None,
    bounds: Optional[dict] = None,
) -> list[VerificationReport]:
    """Run every case (optionally in a thread pool); reports in case order."""
    if bounds is None:
        bounds = load_regression_bounds()
    if threads is not None and threads > 1 and len(cases) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda c: run_theorem(c, bounds), cases))
    return [run_theorem(c, bounds) for c in cases]

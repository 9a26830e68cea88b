"""Homogeneous group instances: group law, dilations, quasi-norms, polar integration.

Three concrete instances are supported:

* abelian R^n with isotropic dilations and the euclidean norm,
* abelian R^n with anisotropic weights and the max-type quasi-norm
  ``|x| = max_i |x_i|^(1/nu_i)`` (unit ball is the box ``|x_i| < 1``),
* the first Heisenberg group with weights (1, 1, 2) and the gauge
  ``|x| = ((x1^2 + x2^2)^2 + 16 x3^2)^(1/4)``.

Points are plain float arrays of shape (..., n); all operations broadcast.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ._quadcore import QuadResult, improper_power_integral
from .errors import ConfigurationError, InputError, PrecisionError
from .plan import DEFAULT_PLAN, QuadraturePlan

LN2 = math.log(2.0)

LAW_ABELIAN = "abelian"
LAW_HEISENBERG1 = "heisenberg1"
NORM_EUCLIDEAN = "euclidean"
NORM_MAX_ANISO = "max-aniso"
NORM_KORANYI = "koranyi"


@dataclass(frozen=True)
class GroupDescriptor:
    """One homogeneous group: dimension, dilation weights, law and norm tags.

    vol1 is the Haar volume of the unit quasi-ball and sigma the total
    measure of the unit quasi-sphere in the polar decomposition; they always
    satisfy sigma = Q * vol1.
    """

    n: int
    weights: tuple[float, ...]
    law: str
    norm: str
    vol1: float
    sigma: float

    @property
    def Q(self) -> float:
        """Homogeneous dimension: the trace of the dilation generator."""
        return float(sum(self.weights))

    @property
    def spec(self) -> str:
        if self.law == LAW_HEISENBERG1:
            return "heis1"
        if all(w == 1.0 for w in self.weights):
            return f"abelian:iso:n={self.n}"
        nu = ",".join(format(w, "g") for w in self.weights)
        return f"abelian:aniso:nu={nu}"

    def ball_volume(self, r: float) -> float:
        return self.vol1 * r**self.Q

    def origin(self) -> np.ndarray:
        return np.zeros(self.n)


def abelian_iso(n: int) -> GroupDescriptor:
    """Isotropic R^n with the euclidean norm."""
    if n < 1:
        raise InputError("dimension must be >= 1")
    if n > 3:
        raise ConfigurationError("euclidean sphere charts implemented for n <= 3")
    vol1 = math.pi ** (n / 2) / math.gamma(n / 2 + 1)
    return GroupDescriptor(n, (1.0,) * n, LAW_ABELIAN, NORM_EUCLIDEAN, vol1, n * vol1)


def abelian_aniso(weights: Sequence[float]) -> GroupDescriptor:
    """Anisotropic R^n with the max-type quasi-norm (unit ball = open box)."""
    w = tuple(float(v) for v in weights)
    if not w:
        raise InputError("need at least one dilation weight")
    if any(v < 1.0 for v in w):
        raise InputError("dilation weights must be >= 1")
    n = len(w)
    vol1 = float(2**n)
    return GroupDescriptor(n, w, LAW_ABELIAN, NORM_MAX_ANISO, vol1, sum(w) * vol1)


def heisenberg1() -> GroupDescriptor:
    """First Heisenberg group, weights (1, 1, 2), Koranyi-type gauge.

    vol1 = pi^2/8 is the closed form of the gauge ball volume; the Monte-Carlo
    estimator in sphere_measure provides an independent cross-check.
    """
    vol1 = math.pi**2 / 8.0
    return GroupDescriptor(3, (1.0, 1.0, 2.0), LAW_HEISENBERG1, NORM_KORANYI, vol1, 4 * vol1)


def parse_group(spec: str) -> GroupDescriptor:
    """Build a descriptor from a CLI spec string.

    Accepted forms: "abelian:iso:n=2", "abelian:aniso:nu=1,2", "heis1".
    """
    s = spec.strip()
    if s == "heis1":
        return heisenberg1()
    parts = s.split(":")
    if len(parts) == 3 and parts[0] == "abelian":
        kind, arg = parts[1], parts[2]
        if kind == "iso" and arg.startswith("n="):
            return abelian_iso(int(arg[2:]))
        if kind == "aniso" and arg.startswith("nu="):
            return abelian_aniso([float(v) for v in arg[3:].split(",")])
    raise InputError(f"unrecognised group spec: {spec!r}")


# ----------------------------------------------------------------------------
# Group operations (vectorised over leading axes)
# ----------------------------------------------------------------------------


def _check_points(g: GroupDescriptor, *arrays: np.ndarray) -> list[np.ndarray]:
    out = []
    for a in arrays:
        a = np.asarray(a, dtype=float)
        if a.shape[-1:] != (g.n,):
            raise InputError(f"point has dimension {a.shape[-1:]} but group needs {g.n}")
        out.append(a)
    return out


def multiply(g: GroupDescriptor, x, y) -> np.ndarray:
    """Group product x*y."""
    x, y = _check_points(g, x, y)
    out = x + y
    if g.law == LAW_HEISENBERG1:
        out = np.array(out, copy=True)
        out[..., 2] = (
            x[..., 2] + y[..., 2] + 0.5 * (x[..., 0] * y[..., 1] - x[..., 1] * y[..., 0])
        )
    return out


def inverse(g: GroupDescriptor, x) -> np.ndarray:
    """Group inverse; componentwise negation for both supported laws."""
    (x,) = _check_points(g, x)
    return -x


def dilate(g: GroupDescriptor, lam: float, x) -> np.ndarray:
    """Anisotropic dilation: coordinate i scales by lam**nu_i."""
    if lam <= 0:
        raise InputError("dilation parameter must be positive")
    (x,) = _check_points(g, x)
    scale = np.array([lam**w for w in g.weights])
    return x * scale


def quasi_norm(g: GroupDescriptor, x) -> np.ndarray:
    """Homogeneous quasi-norm of x (vectorised; returns shape x.shape[:-1])."""
    (x,) = _check_points(g, x)
    if g.norm == NORM_EUCLIDEAN:
        return np.sqrt(np.sum(x * x, axis=-1))
    if g.norm == NORM_MAX_ANISO:
        vals = np.abs(x) ** np.array([1.0 / w for w in g.weights])
        return np.max(vals, axis=-1)
    if g.norm == NORM_KORANYI:
        plane = x[..., 0] ** 2 + x[..., 1] ** 2
        return (plane**2 + 16.0 * x[..., 2] ** 2) ** 0.25
    raise ConfigurationError(f"unknown norm tag {g.norm!r}")


def triangle_constant(g: GroupDescriptor) -> float:
    """Constant c with |xy| <= c(|x| + |y|).

    Exactly 1 for both abelian norms (weights >= 1); a safe bound of 2 is used
    for the Heisenberg gauge, which only widens truncation margins.
    """
    return 1.0 if g.law == LAW_ABELIAN else 2.0


# ----------------------------------------------------------------------------
# Sphere charts and measures
# ----------------------------------------------------------------------------


def sphere_chart(g: GroupDescriptor, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Quadrature nodes W (K, n) and weights (K,) on the unit quasi-sphere.

    The weights discretise the polar surface measure, so sum(weights) equals
    the total sphere measure |sigma| up to the rule's own error (exactly, for
    midpoint rules on the charts used here).
    """
    m = max(2, int(order))
    if g.norm == NORM_EUCLIDEAN:
        if g.n == 1:
            return np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])
        if g.n == 2:
            theta = (np.arange(4 * m) + 0.5) * (2 * math.pi / (4 * m))
            pts = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
            return pts, np.full(4 * m, 2 * math.pi / (4 * m))
        if g.n == 3:
            # product rule: Gauss-Legendre in cos(polar) x midpoint azimuth
            z, wz = np.polynomial.legendre.leggauss(m)
            phi = (np.arange(2 * m) + 0.5) * (2 * math.pi / (2 * m))
            Z, PHI = np.meshgrid(z, phi, indexing="ij")
            s = np.sqrt(1 - Z**2)
            pts = np.stack([s * np.cos(PHI), s * np.sin(PHI), Z], axis=-1).reshape(-1, 3)
            wts = (wz[:, None] * np.full(2 * m, math.pi / m)[None, :]).reshape(-1)
            return pts, wts
        raise ConfigurationError("euclidean charts implemented for n <= 3")
    if g.norm == NORM_MAX_ANISO:
        # box boundary: 2n faces, face i carries surface density nu_i
        n = g.n
        pts_list, wts_list = [], []
        if n == 1:
            return np.array([[1.0], [-1.0]]), np.array([g.weights[0], g.weights[0]])
        u = (np.arange(m) + 0.5) * (2.0 / m) - 1.0
        grids = np.meshgrid(*([u] * (n - 1)), indexing="ij")
        face_pts = np.stack([v.reshape(-1) for v in grids], axis=-1)  # (m^(n-1), n-1)
        cell = (2.0 / m) ** (n - 1)
        for i in range(n):
            for sign in (1.0, -1.0):
                pts = np.empty((face_pts.shape[0], n))
                pts[:, i] = sign
                others = [j for j in range(n) if j != i]
                pts[:, others] = face_pts
                pts_list.append(pts)
                wts_list.append(np.full(face_pts.shape[0], g.weights[i] * cell))
        return np.concatenate(pts_list), np.concatenate(wts_list)
    if g.norm == NORM_KORANYI:
        # chart (t, theta) per hemisphere with flat density dt dtheta / 4
        t = (np.arange(m) + 0.5) * (math.pi / 2 / m)
        theta = (np.arange(2 * m) + 0.5) * (2 * math.pi / (2 * m))
        T, TH = np.meshgrid(t, theta, indexing="ij")
        s = np.sqrt(np.sin(T))
        w3 = np.cos(T) / 4.0
        top = np.stack([s * np.cos(TH), s * np.sin(TH), w3], axis=-1).reshape(-1, 3)
        bot = np.stack([s * np.cos(TH), s * np.sin(TH), -w3], axis=-1).reshape(-1, 3)
        pts = np.concatenate([top, bot])
        w = (math.pi / 2 / m) * (math.pi / m) / 4.0
        return pts, np.full(pts.shape[0], w)
    raise ConfigurationError(f"unknown norm tag {g.norm!r}")


def _mc_unit_ball_volume(g: GroupDescriptor, plan: QuadraturePlan) -> QuadResult:
    """Seeded Monte-Carlo volume of the Koranyi unit ball; deterministic."""
    rng = np.random.default_rng(plan.mc_seed)
    box_vol = 2.0  # [-1,1]^2 x [-1/4,1/4]
    hits = 0
    total = 0
    chunk = 1 << 20
    while total < plan.mc_budget:
        pts = rng.random((chunk, 3))
        pts[:, :2] = pts[:, :2] * 2.0 - 1.0
        pts[:, 2] = pts[:, 2] * 0.5 - 0.25
        hits += int(np.count_nonzero(quasi_norm(g, pts) < 1.0))
        total += chunk
        p = hits / total
        est = p * box_vol
        se = box_vol * math.sqrt(max(p * (1 - p), 1e-12) / total)
        if se <= plan.tol * est and total >= (1 << 21):
            return QuadResult(est, se)
    raise PrecisionError("koranyi unit-ball volume", se, plan.tol * est)


def sphere_measure(g: GroupDescriptor, plan: QuadraturePlan = DEFAULT_PLAN) -> QuadResult:
    """Total sphere measure |sigma| = Q * vol1.

    Exact for the euclidean and max-aniso norms.  For the Koranyi gauge the
    ball volume is estimated by seeded Monte-Carlo and the standard error is
    reported; the descriptor itself stores the chart's closed form.
    """
    if g.norm in (NORM_EUCLIDEAN, NORM_MAX_ANISO):
        return QuadResult(g.Q * g.vol1, 0.0)
    vol = _mc_unit_ball_volume(g, plan)
    return QuadResult(g.Q * vol.value, g.Q * vol.error)


# ----------------------------------------------------------------------------
# 1-D radial integration against r^(Q-1) dr
# ----------------------------------------------------------------------------


def radial_integrate(
    g: GroupDescriptor,
    h: Callable[[np.ndarray], np.ndarray],
    r_lo: float,
    r_hi: float,
    plan: QuadraturePlan = DEFAULT_PLAN,
    knots: Sequence[float] = (),
) -> QuadResult:
    """|sigma| * integral of h(r) r^(Q-1) dr over (r_lo, r_hi).

    Realises the polar decomposition for quasi-norm-radial integrands.  Uses
    the substitution r = e^u with composite Simpson blocks one octave wide;
    r_lo = 0 and r_hi = inf extend blockwise until contributions decay
    geometrically, and growth or stalling is reported as divergence.  Known
    integrand kinks can be passed via `knots` so block edges land on them.
    """
    res = improper_power_integral(
        h,
        g.Q,
        r_lo,
        r_hi,
        intervals=plan.radial_intervals,
        tol=plan.tol,
        knots=knots,
        what="radial integral",
    )
    return QuadResult(g.sigma * res.value, g.sigma * res.error)

"""Polar node sets for quasi-ball and shell quadrature on any catalog group."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np
from scipy.stats import qmc

from ._quadcore import block_edges
from .errors import ConfigurationError
from .group import LAW_ABELIAN, GroupDescriptor, quasi_norm, sphere_chart
from .plan import QuadraturePlan

_LEGGAUSS_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _leggauss(m: int) -> tuple[np.ndarray, np.ndarray]:
    if m not in _LEGGAUSS_CACHE:
        _LEGGAUSS_CACHE[m] = np.polynomial.legendre.leggauss(m)
    return _LEGGAUSS_CACHE[m]


def log_radial_rule(
    lo: float, hi: float, nodes_per_octave: int, exponent: float, knots: Sequence[float] = ()
) -> tuple[np.ndarray, np.ndarray]:
    """Nodes t and weights w with  integral_lo^hi h(t) t^(exponent-1) dt ~ sum w h(t).

    Gauss-Legendre in u = log t on octave blocks; block edges honour knots.
    """
    ku = [math.log(k) for k in knots if lo < k < hi]
    edges = block_edges(math.log(lo), math.log(hi), ku)
    xg, wg = _leggauss(max(1, nodes_per_octave))
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * np.diff(edges)
    u = (mid[:, None] + half[:, None] * xg[None, :]).reshape(-1)
    w = (half[:, None] * wg[None, :]).reshape(-1)
    return np.exp(u), w * np.exp(exponent * u)


def ball_nodes(
    g: GroupDescriptor,
    r: float,
    plan: QuadraturePlan,
    knots: Sequence[float] = (),
    inner_octaves: int | None = None,
    sphere_order: int | None = None,
    radial_per_octave: int = 4,
) -> tuple[np.ndarray, np.ndarray]:
    """Quadrature nodes for integral over the quasi-ball B(0, r).

    Polar product rule: log-radial Gauss-Legendre times the group's sphere
    chart.  The radial span is [r 2^-inner_octaves, r]; the missing inner ball
    has relative volume 2^(-Q * inner_octaves) and is accounted for in the
    callers' error estimates.
    """
    K = plan.ball_inner_octaves if inner_octaves is None else inner_octaves
    m = plan.sphere_order if sphere_order is None else sphere_order
    t, wt = log_radial_rule(r * 2.0**-K, r, radial_per_octave, g.Q, knots=knots)
    W, ws = sphere_chart(g, m)
    # x = D_t(w): scale each sphere node by t**nu coordinatewise
    scale = t[:, None] ** np.array(g.weights)[None, :]
    pts = scale[:, None, :] * W[None, :, :]
    wts = wt[:, None] * ws[None, :]
    return pts.reshape(-1, g.n), wts.reshape(-1)


def box_ball_nodes(g: GroupDescriptor, r: float, m: int) -> tuple[np.ndarray, np.ndarray]:
    """Tensor Gauss-Legendre nodes on the max-aniso quasi-ball (an open box).

    Far better than polar charts for integrands whose features are thin slabs
    of the box, e.g. off-centre overlaps with small supports.
    """
    if g.norm != "max-aniso":
        raise ConfigurationError("box nodes require the max-aniso quasi-ball")
    xg, wg = _leggauss(max(2, m))
    half = np.array([r**w for w in g.weights])
    axes = [half[i] * xg for i in range(g.n)]
    wts_ax = [half[i] * wg for i in range(g.n)]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([v.reshape(-1) for v in mesh], axis=-1)
    wmesh = np.meshgrid(*wts_ax, indexing="ij")
    wts = np.ones(pts.shape[0])
    for v in wmesh:
        wts = wts * v.reshape(-1)
    return pts, wts


def ball_nodes_centered(
    g: GroupDescriptor,
    r: float,
    plan: QuadraturePlan,
    knots: Sequence[float] = (),
    box_per_axis: int | None = None,
    **polar_kw,
) -> tuple[np.ndarray, np.ndarray]:
    """Nodes on B(0, r), picking the geometry best suited to the group norm."""
    if g.norm == "max-aniso" or g.n == 1:
        m = box_per_axis if box_per_axis is not None else plan.sphere_order
        if g.norm == "max-aniso":
            return box_ball_nodes(g, r, m)
        xg, wg = _leggauss(max(2, m))
        return (r * xg)[:, None], r * wg
    return ball_nodes(g, r, plan, knots=knots, **polar_kw)


def shell_nodes_abelian(
    g: GroupDescriptor,
    t_lo: float,
    t_hi: float,
    plan: QuadraturePlan,
    knots: Sequence[float] = (),
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Tensor nodes on the shell t_lo <= |z| < t_hi for abelian groups.

    Returns (points, weights, radii); weights discretise Haar measure, and
    the radii are exact so radial kernels can be evaluated without recomputing
    the quasi-norm.
    """
    if g.law != LAW_ABELIAN:
        raise ConfigurationError("tensor shells are for abelian groups")
    per_octave = max(1, plan.shells_per_octave * plan.shell_radial_gl)
    t, wt = log_radial_rule(t_lo, t_hi, per_octave, g.Q, knots=knots)
    W, ws = sphere_chart(g, plan.sphere_order)
    scale = t[:, None] ** np.array(g.weights)[None, :]
    pts = (scale[:, None, :] * W[None, :, :]).reshape(-1, g.n)
    wts = (wt[:, None] * ws[None, :]).reshape(-1)
    radii = np.repeat(t, W.shape[0])
    return pts, wts, radii


def sphere_ball_overlap(
    g: GroupDescriptor, t: np.ndarray, X: np.ndarray, R: float
) -> np.ndarray:
    """Chart measure of {w : |w| = 1, D_t w in B(x, R)} for abelian groups.

    Vectorised over a batch of centres X (Nx, n) and radii t (Nt,); returns
    (Nx, Nt).  Exact interval/arc arithmetic: box faces for the max-aniso
    norm, circular arcs for the euclidean norm in n <= 2.
    """
    if g.law != LAW_ABELIAN:
        raise ConfigurationError("sphere-ball overlap implemented for abelian groups")
    t = np.asarray(t, dtype=float)
    if t.ndim == 1:
        t = t[None, :]
    X = np.asarray(X, dtype=float)
    if g.norm == "max-aniso":
        nu = np.array(g.weights)
        half = R**nu
        out = np.zeros((X.shape[0], t.shape[1]))
        for i in range(g.n):
            others = [j for j in range(g.n) if j != i]
            tpow_i = t ** nu[i]
            frac = np.ones((X.shape[0], t.shape[1]))
            for j in others:
                tp = t ** nu[j]
                lo = (X[:, j : j + 1] - half[j]) / tp
                hi = (X[:, j : j + 1] + half[j]) / tp
                frac = frac * np.clip(np.minimum(hi, 1.0) - np.maximum(lo, -1.0), 0.0, 2.0)
            for sign in (1.0, -1.0):
                ok = np.abs(sign * tpow_i - X[:, i : i + 1]) < half[i]
                out = out + np.where(ok, g.weights[i] * frac, 0.0)
        return out
    if g.norm == "euclidean" and g.n == 1:
        out = np.zeros((X.shape[0], t.shape[1]))
        for sign in (1.0, -1.0):
            out = out + (np.abs(sign * t - X[:, 0:1]) < R).astype(float)
        return out
    if g.norm == "euclidean" and g.n == 2:
        d = np.sqrt(np.sum(X * X, axis=1))[:, None]
        full = 2.0 * math.pi
        with np.errstate(invalid="ignore", divide="ignore"):
            cosang = (t**2 + d**2 - R**2) / (2.0 * t * d)
            ang = 2.0 * np.arccos(np.clip(cosang, -1.0, 1.0))
        out = np.where(t <= R - d, full, np.where(t >= R + d, 0.0, ang))
        out = np.where((d == 0) & (t < R), full, out)
        out = np.where((d == 0) & (t >= R), 0.0, out)
        return out
    raise ConfigurationError("sphere-ball overlap implemented for box and disc norms")


def ball_overlap_window(
    g: GroupDescriptor, X: np.ndarray, R: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Radial structure of B(x, R) seen from the origin, per centre x.

    Returns (t_full, t_lo, t_hi): spheres of radius t <= t_full lie entirely
    inside the ball, the overlap is partial exactly on [t_lo, t_hi], and
    spheres beyond t_hi miss it.  The window can be arbitrarily thin (width
    ~ R^nu_i around |x_i|), so quadrature must resolve it explicitly.
    """
    X = np.asarray(X, dtype=float)
    if g.norm == "max-aniso":
        nu = np.array(g.weights)
        half = R**nu
        inside = np.maximum(half[None, :] - np.abs(X), 0.0) ** (1.0 / nu[None, :])
        t_full = np.min(inside, axis=1)
        lo = np.maximum(np.abs(X) - half[None, :], 0.0) ** (1.0 / nu[None, :])
        t_lo = np.maximum(np.max(lo, axis=1), t_full)
        t_hi = np.max((np.abs(X) + half[None, :]) ** (1.0 / nu[None, :]), axis=1)
        return t_full, t_lo, t_hi
    if g.norm == "euclidean" and g.n <= 2:
        d = np.sqrt(np.sum(X * X, axis=1))
        t_full = np.maximum(R - d, 0.0)
        return t_full, np.abs(R - d), d + R
    raise ConfigurationError("overlap windows implemented for box and disc norms")


def shell_nodes_qmc(
    g: GroupDescriptor,
    t_lo: float,
    t_hi: float,
    plan: QuadraturePlan,
    shell_index: int,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Quasi-Monte-Carlo nodes on a Heisenberg shell t_lo <= |z| < t_hi.

    Scrambled Sobol points in the bounding box of the outer ball, restricted
    to the shell; the scramble seed derives from (plan.mc_seed, shell_index)
    so results do not depend on evaluation order.
    """
    half = np.array([t_hi, t_hi, t_hi**2 / 4.0])
    box_vol = float(np.prod(2 * half))
    n_target = max(64, plan.nodes_per_shell * 4)
    m = int(math.ceil(math.log2(n_target)))
    sob = qmc.Sobol(d=3, scramble=True, seed=plan.mc_seed * 1_000_003 + shell_index)
    pts = sob.random(2**m) * 2.0 - 1.0
    pts = pts * half[None, :]
    radii = quasi_norm(g, pts)
    keep = (radii >= t_lo) & (radii < t_hi)
    pts, radii = pts[keep], radii[keep]
    w = np.full(pts.shape[0], box_vol / 2**m)
    return pts, w, radii


def shell_cover(
    g: GroupDescriptor,
    t_lo: float,
    t_hi: float,
    plan: QuadraturePlan,
    knots: Sequence[float] = (),
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Nodes covering the full annulus t_lo <= |z| < t_hi, any catalog group."""
    if g.law == LAW_ABELIAN:
        return shell_nodes_abelian(g, t_lo, t_hi, plan, knots=knots)
    pts_list, w_list, r_list = [], [], []
    edges = 2.0 ** np.arange(
        math.floor(math.log2(t_lo)), math.ceil(math.log2(t_hi)) + 1
    )
    edges = np.clip(edges, t_lo, t_hi)
    edges = np.unique(np.concatenate([[t_lo], edges, [t_hi]]))
    for i, (a, b) in enumerate(zip(edges[:-1], edges[1:])):
        if b <= a:
            continue
        p, w, r = shell_nodes_qmc(g, float(a), float(b), plan, i)
        pts_list.append(p)
        w_list.append(w)
        r_list.append(r)
    return np.concatenate(pts_list), np.concatenate(w_list), np.concatenate(r_list)

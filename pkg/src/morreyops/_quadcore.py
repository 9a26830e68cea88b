"""Shared 1-D improper-integral engine on log-spaced octave blocks."""

from __future__ import annotations

import math
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import DivergenceError, InputError

LN2 = math.log(2.0)

_MAX_OCTAVES = 2400
_STALL_WINDOW = 32
_BLOWUP = 1e18


class QuadResult(NamedTuple):
    """A quadrature value together with an absolute error estimate."""

    value: float
    error: float


def simpson_on_blocks(
    F: Callable[[np.ndarray], np.ndarray], edges: np.ndarray, m: int
) -> tuple[np.ndarray, np.ndarray]:
    """Composite Simpson per block; returns (fine, coarse) block integrals.

    m is the (even) interval count per block; the coarse rule reuses every
    other node so both come from a single evaluation pass.
    """
    nb = len(edges) - 1
    tau = np.arange(m + 1) / m
    nodes = edges[:-1, None] + np.diff(edges)[:, None] * tau[None, :]
    # nudge boundary nodes inward so a block adjoining a jump (block edges are
    # placed on known knots) samples its own one-sided limit
    h = np.diff(edges) / m
    nodes[:, 0] += 1e-9 * h
    nodes[:, -1] -= 1e-9 * h
    vals = np.asarray(F(nodes.reshape(-1)), dtype=float).reshape(nb, m + 1)
    if not np.all(np.isfinite(vals)):
        raise DivergenceError("integrand", "non-finite value")
    h = np.diff(edges) / m
    wf = np.ones(m + 1)
    wf[1:-1:2] = 4.0
    wf[2:-1:2] = 2.0
    fine = (vals * wf).sum(axis=1) * h / 3.0
    wc = np.ones(m // 2 + 1)
    wc[1:-1:2] = 4.0
    wc[2:-1:2] = 2.0
    coarse = (vals[:, ::2] * wc).sum(axis=1) * (2 * h) / 3.0
    return fine, coarse


def block_edges(u0: float, u1: float, knots_u: Sequence[float]) -> np.ndarray:
    """Octave-or-finer block edges on [u0, u1], honouring interior knots."""
    cuts = [u0, u1] + [u for u in knots_u if u0 < u < u1]
    cuts = sorted(set(cuts))
    edges: list[float] = []
    for a, b in zip(cuts[:-1], cuts[1:]):
        k = max(1, int(math.ceil((b - a) / LN2 - 1e-12)))
        edges.extend(np.linspace(a, b, k + 1)[:-1])
    edges.append(cuts[-1])
    return np.array(edges)


def improper_power_integral(
    h: Callable[[np.ndarray], np.ndarray],
    exponent: float,
    r_lo: float,
    r_hi: float,
    intervals: int = 16,
    tol: float = 1e-3,
    knots: Sequence[float] = (),
    what: str = "radial integral",
) -> QuadResult:
    """integral of h(r) * r^(exponent-1) dr over (r_lo, r_hi).

    Substitutes r = e^u and applies composite Simpson on octave blocks.
    r_lo = 0 / r_hi = inf extend blockwise until contributions decay
    geometrically; growth or stalling raises DivergenceError.  `knots` marks
    radii where h has kinks so block edges land there.
    """
    if r_lo < 0:
        raise InputError("lower limit must be >= 0")
    if r_hi <= r_lo:
        return QuadResult(0.0, 0.0)

    def F(u: np.ndarray) -> np.ndarray:
        r = np.exp(u)
        return np.asarray(h(r), dtype=float) * np.exp(exponent * u)

    m = max(4, intervals - intervals % 2)
    knots_u = [math.log(k) for k in knots if k > 0]
    value = 0.0
    richardson = 0.0
    tail = 0.0
    floor = 1e-300

    finite_lo = r_lo > 0.0
    finite_hi = math.isfinite(r_hi)

    if finite_lo and finite_hi:
        edges = block_edges(math.log(r_lo), math.log(r_hi), knots_u)
        fine, coarse = simpson_on_blocks(F, edges, m)
        return QuadResult(float(fine.sum()), float(np.abs(fine - coarse).sum()) / 8.0)

    if finite_hi:
        anchor_hi = math.log(r_hi)
    elif finite_lo:
        anchor_hi = max(0.0, math.log(r_lo))
    else:
        anchor_hi = 0.0
    anchor_lo = math.log(r_lo) if finite_lo else min(anchor_hi, 0.0)
    if anchor_hi > anchor_lo:
        edges = block_edges(anchor_lo, anchor_hi, knots_u)
        fine, coarse = simpson_on_blocks(F, edges, m)
        value = float(fine.sum())
        richardson = float(np.abs(fine - coarse).sum()) / 8.0

    rel_floor = tol / 50.0

    def extend(direction: int, u_start: float) -> tuple[float, float, float]:
        acc = 0.0
        rich = 0.0
        history: list[float] = []
        small_run = 0
        for k in range(_MAX_OCTAVES):
            if direction < 0:
                a, b = u_start - (k + 1) * LN2, u_start - k * LN2
            else:
                a, b = u_start + k * LN2, u_start + (k + 1) * LN2
            fine, coarse = simpson_on_blocks(F, np.array([a, b]), m)
            blk = float(fine[0])
            rich += abs(blk - float(coarse[0])) / 8.0
            acc += blk
            history.append(abs(blk))
            if abs(blk) > _BLOWUP:
                raise DivergenceError(what, "integrand grows after substitution")
            scale = abs(value) + abs(acc) + floor
            if abs(blk) <= rel_floor * scale:
                small_run += 1
                if small_run >= 3:
                    prev = history[-2] if len(history) > 1 else abs(blk)
                    ratio = min(0.95, abs(blk) / prev) if prev > 0 else 0.0
                    t = abs(blk) * ratio / (1 - ratio) if ratio > 0 else 0.0
                    return acc, rich, t
            else:
                small_run = 0
            if len(history) > _STALL_WINDOW:
                if history[-1] >= 0.9 * history[-1 - _STALL_WINDOW] > rel_floor * scale:
                    side = "lower" if direction < 0 else "upper"
                    raise DivergenceError(what, f"{side} end does not decay")
        raise DivergenceError(what, "block extension exhausted")

    if not finite_lo:
        acc, rich, t = extend(-1, anchor_lo)
        value += acc
        richardson += rich
        tail += t
    if not finite_hi:
        acc, rich, t = extend(+1, anchor_hi)
        value += acc
        richardson += rich
        tail += t
    return QuadResult(value, richardson + tail)


def cumulative_power_integrals(
    h: Callable[[np.ndarray], np.ndarray],
    exponent: float,
    radii: np.ndarray,
    intervals: int = 16,
    tol: float = 1e-3,
    knots: Sequence[float] = (),
    what: str = "radial integral",
) -> tuple[np.ndarray, np.ndarray]:
    """int_0^{r_i} h(t) t^(exponent-1) dt for an ascending grid of radii.

    One blockwise pass over the grid plus a single improper integral below
    the smallest radius; much cheaper than independent calls per radius.
    Returns (values, error estimates).
    """
    radii = np.asarray(radii, dtype=float)
    if np.any(np.diff(radii) <= 0) or radii[0] <= 0:
        raise InputError("radii must be positive and strictly increasing")
    base = improper_power_integral(
        h, exponent, 0.0, float(radii[0]), intervals=intervals, tol=tol, knots=knots, what=what
    )
    if len(radii) == 1:
        return np.array([base.value]), np.array([base.error])

    u = np.log(radii)
    ku = sorted(math.log(k) for k in knots if radii[0] < k < radii[-1])
    edges = np.unique(np.concatenate([u, np.asarray(ku)])) if ku else u
    edges = block_edges(float(edges[0]), float(edges[-1]), list(edges[1:-1]))

    def F(uu: np.ndarray) -> np.ndarray:
        t = np.exp(uu)
        return np.asarray(h(t), dtype=float) * np.exp(exponent * uu)

    m = max(4, intervals - intervals % 2)
    fine, coarse = simpson_on_blocks(F, edges, m)
    cum = np.concatenate([[0.0], np.cumsum(fine)])
    cum_err = np.concatenate([[0.0], np.cumsum(np.abs(fine - coarse) / 8.0)])
    idx = np.searchsorted(edges, u)
    # grid points are edges by construction; guard against float fuzz
    idx = np.clip(idx, 0, len(cum) - 1)
    return base.value + cum[idx], base.error + cum_err[idx]

"""Analytic test-function catalog and grid sampling.

Every function the operators and norms consume comes from this catalog:
quasi-ball indicators, (windowed) powers of the quasi-norm, radial gaussians,
group shifts of a base function, and finite linear combinations.  Each carries
a certified decay class so convolution truncations can be bounded, and knows
whether it is quasi-norm radial (which unlocks fast polar quadrature).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import group as grp
from .errors import InputError, ResourceError

# power evaluation caps the quasi-norm below this, keeping quadrature finite;
# all integrals in scope are absolutely convergent so the perturbation is
# below tolerance.
POWER_CAP = 1e-9

KIND_BALL = "ball-indicator"
KIND_POWER = "power"
KIND_GAUSSIAN = "radial-gaussian"
KIND_SHIFTED = "shifted"
KIND_COMBO = "combo"

_GRID_BUDGET = 1 << 24


@dataclass(frozen=True)
class DecayClass:
    """Certified envelope of |f| far from the origin.

    kind 'compact': |f| = 0 outside the quasi-ball of `radius`.
    kind 'power':   |f| <= const * |x|^exponent for |x| >= valid_from.
    kind 'gaussian': |f| <= const * exp(-(|x|/width)^2) for |x| >= valid_from.
    """

    kind: str
    radius: float = math.inf
    exponent: float = 0.0
    const: float = 1.0
    width: float = 1.0
    valid_from: float = 0.0


@dataclass(frozen=True)
class TestFunction:
    """One catalog function, evaluable at any point of any supported group."""

    kind: str
    a: float = 1.0                 # ball radius
    c: float = 1.0                 # amplitude for power
    s: float = 0.0                 # power exponent
    lo: float = 0.0                # power support window [lo, hi)
    hi: float = math.inf
    width: float = 1.0             # gaussian width
    z: tuple[float, ...] = ()      # shift
    base: Optional["TestFunction"] = None
    members: tuple[tuple[float, "TestFunction"], ...] = ()
    spec: str = field(default="", compare=False)

    # -- catalog structure ---------------------------------------------------

    def is_radial(self) -> bool:
        if self.kind in (KIND_BALL, KIND_POWER, KIND_GAUSSIAN):
            return True
        if self.kind == KIND_COMBO:
            return all(m.is_radial() for _, m in self.members)
        return False

    def nonnegative(self) -> bool:
        if self.kind == KIND_COMBO:
            return all(coef >= 0 and m.nonnegative() for coef, m in self.members)
        if self.kind == KIND_SHIFTED:
            return self.base.nonnegative()
        return True

    def radial_knots(self) -> tuple[float, ...]:
        """Radii where the radial profile jumps or kinks."""
        if self.kind == KIND_BALL:
            return (self.a,)
        if self.kind == KIND_POWER:
            return tuple(v for v in (self.lo, self.hi) if 0 < v < math.inf)
        if self.kind == KIND_COMBO:
            out: list[float] = []
            for _, m in self.members:
                out.extend(m.radial_knots())
            return tuple(sorted(set(out)))
        return ()

    def origin_singularity(self) -> Optional[tuple[float, float]]:
        """(const, exponent) when |f| ~ const*|x|^exponent blows up at 0."""
        if self.kind == KIND_POWER and self.s < 0 and self.lo == 0.0:
            return (self.c, self.s)
        if self.kind == KIND_COMBO:
            hits = [m.origin_singularity() for _, m in self.members]
            hits = [(abs(coef) * c, s) for (coef, _), h in zip(self.members, hits) if h for c, s in [h]]
            if hits:
                worst = min(s for _, s in hits)
                return (sum(c for c, _ in hits), worst)
        return None

    # -- evaluation ----------------------------------------------------------

    def radial_values(self, t) -> np.ndarray:
        """Profile F with f(x) = F(|x|); only for radial kinds."""
        t = np.asarray(t, dtype=float)
        if self.kind == KIND_BALL:
            return (t < self.a).astype(float)
        if self.kind == KIND_POWER:
            v = self.c * np.maximum(t, POWER_CAP) ** self.s
            return v * ((t >= self.lo) & (t < self.hi))
        if self.kind == KIND_GAUSSIAN:
            return np.exp(-((t / self.width) ** 2))
        if self.kind == KIND_COMBO and self.is_radial():
            out = np.zeros_like(t)
            for coef, m in self.members:
                out = out + coef * m.radial_values(t)
            return out
        raise InputError(f"{self.kind} is not quasi-norm radial")

    def eval(self, g: grp.GroupDescriptor, x) -> np.ndarray:
        """Deterministic point evaluation, vectorised over leading axes."""
        x = np.asarray(x, dtype=float)
        if self.kind == KIND_SHIFTED:
            z = np.asarray(self.z, dtype=float)
            if z.shape != (g.n,):
                raise InputError(f"shift has dimension {z.shape} but group needs {g.n}")
            return self.base.eval(g, grp.multiply(g, -z, x))
        if self.kind == KIND_COMBO:
            out = np.zeros(x.shape[:-1])
            for coef, m in self.members:
                out = out + coef * m.eval(g, x)
            return out
        return self.radial_values(grp.quasi_norm(g, x))

    # -- certified decay -----------------------------------------------------

    def decay(self, g: grp.GroupDescriptor) -> DecayClass:
        ct = grp.triangle_constant(g)
        if self.kind == KIND_BALL:
            return DecayClass("compact", radius=self.a)
        if self.kind == KIND_POWER:
            if math.isfinite(self.hi):
                return DecayClass("compact", radius=self.hi)
            return DecayClass("power", exponent=self.s, const=self.c,
                              valid_from=max(self.lo, POWER_CAP))
        if self.kind == KIND_GAUSSIAN:
            return DecayClass("gaussian", width=self.width)
        if self.kind == KIND_SHIFTED:
            d = self.base.decay(g)
            shift = float(grp.quasi_norm(g, np.asarray(self.z, dtype=float)))
            if d.kind == "compact":
                return DecayClass("compact", radius=ct * (d.radius + shift))
            if d.kind == "power":
                # for |x| >= 2*ct*shift the base argument is >= |x|/(2*ct)
                return DecayClass(
                    "power", exponent=d.exponent,
                    const=d.const * (2 * ct) ** abs(d.exponent),
                    valid_from=max(2 * ct * (shift + 1e-12), 2 * ct * d.valid_from),
                )
            return DecayClass(
                "gaussian", width=d.width * 2 * ct, const=d.const,
                valid_from=2 * ct * (shift + d.valid_from),
            )
        if self.kind == KIND_COMBO:
            parts = [(abs(coef), m.decay(g)) for coef, m in self.members]
            if all(d.kind == "compact" for _, d in parts):
                return DecayClass("compact", radius=max(d.radius for _, d in parts))
            if any(d.kind == "power" for _, d in parts):
                pw = [(c, d) for c, d in parts if d.kind == "power"]
                worst = max(d.exponent for _, d in pw)
                const = sum(c * d.const for c, d in pw) + sum(
                    c * d.const for c, d in parts if d.kind != "power"
                )
                vf = max(max((d.valid_from for _, d in pw)),
                         max((d.radius for c, d in parts if d.kind == "compact"), default=0.0),
                         max((d.valid_from for c, d in parts if d.kind == "gaussian"), default=0.0))
                return DecayClass("power", exponent=worst, const=const, valid_from=max(vf, 1.0))
            gs = [(c, d) for c, d in parts if d.kind == "gaussian"]
            width = max(d.width for _, d in gs)
            vf = max((d.radius for _, d in parts if d.kind == "compact"), default=0.0)
            return DecayClass("gaussian", width=width, const=sum(c * d.const for c, d in gs) + 1.0,
                              valid_from=vf)
        raise InputError(f"unknown kind {self.kind!r}")

    def support_ball(self, g: grp.GroupDescriptor) -> Optional[tuple[np.ndarray, float]]:
        """(centre, radius) of a quasi-ball containing the essential support:
        support is inside {y : |centre^-1 y| < radius}.  None when unbounded."""
        ct = grp.triangle_constant(g)
        if self.kind == KIND_BALL:
            return g.origin(), self.a
        if self.kind == KIND_POWER:
            return (g.origin(), self.hi) if math.isfinite(self.hi) else None
        if self.kind == KIND_GAUSSIAN:
            return g.origin(), 6.0 * self.width
        if self.kind == KIND_SHIFTED:
            base = self.base.support_ball(g)
            if base is None:
                return None
            c, s = base
            return grp.multiply(g, np.asarray(self.z, dtype=float), c), s
        if self.kind == KIND_COMBO:
            balls = [m.support_ball(g) for _, m in self.members]
            if any(b is None for b in balls):
                return None
            radius = max(
                ct * (float(grp.quasi_norm(g, c)) + s) for c, s in balls
            )
            return g.origin(), radius
        raise InputError(f"unknown kind {self.kind!r}")

    def support_box(self, g: grp.GroupDescriptor) -> Optional[np.ndarray]:
        """Per-axis half-widths of a box containing (essentially all of) the
        support, or None when the function has mass at every scale.

        Gaussians are clipped at six widths (relative tail below 3e-16), so
        the box is exact for indicators and windowed powers and essentially
        exact for gaussians.
        """
        nu = np.array(g.weights)
        if self.kind == KIND_BALL:
            return self.a**nu
        if self.kind == KIND_POWER:
            return self.hi**nu if math.isfinite(self.hi) else None
        if self.kind == KIND_GAUSSIAN:
            return (6.0 * self.width) ** nu
        if self.kind == KIND_SHIFTED:
            h = self.base.support_box(g)
            if h is None:
                return None
            z = np.abs(np.asarray(self.z, dtype=float))
            out = h + z
            if g.law == grp.LAW_HEISENBERG1:
                out[2] = h[2] + z[2] + 0.5 * (z[0] * h[1] + z[1] * h[0])
            return out
        if self.kind == KIND_COMBO:
            boxes = [m.support_box(g) for _, m in self.members]
            if any(b is None for b in boxes):
                return None
            return np.max(np.stack(boxes), axis=0)
        raise InputError(f"unknown kind {self.kind!r}")

    def sup_on_ball(self, g: grp.GroupDescriptor, x, delta: float) -> float:
        """Upper bound for sup |f| over the quasi-ball B(x, delta).

        Returns inf when an origin singularity may sit inside the ball; the
        caller then switches to an integrated envelope bound.
        """
        x = np.asarray(x, dtype=float)
        d = float(grp.quasi_norm(g, x))
        ct = grp.triangle_constant(g)
        if self.kind == KIND_BALL:
            return 1.0
        if self.kind == KIND_GAUSSIAN:
            return 1.0
        if self.kind == KIND_POWER:
            far = ct * (d + delta)
            near = max(d - ct * delta, 0.0)
            if self.s >= 0:
                return self.c * min(far, self.hi) ** self.s if far > self.lo else 0.0
            base = max(near, self.lo)
            if base <= 0:
                return math.inf
            return self.c * base**self.s
        if self.kind == KIND_SHIFTED:
            y = grp.multiply(g, -np.asarray(self.z, dtype=float), x)
            return self.base.sup_on_ball(g, y, ct * delta)
        if self.kind == KIND_COMBO:
            return float(sum(abs(coef) * m.sup_on_ball(g, x, delta) for coef, m in self.members))
        raise InputError(f"unknown kind {self.kind!r}")

    # -- dilation composition -------------------------------------------------

    def compose_dilation(self, g: grp.GroupDescriptor, lam: float) -> "TestFunction":
        """The catalog function x -> f(D_lam x); the catalog is closed under this."""
        if lam <= 0:
            raise InputError("dilation parameter must be positive")
        if self.kind == KIND_BALL:
            return ball_indicator(self.a / lam)
        if self.kind == KIND_POWER:
            return power_function(self.c * lam**self.s, self.s,
                                  lo=self.lo / lam, hi=self.hi / lam)
        if self.kind == KIND_GAUSSIAN:
            return gaussian(self.width / lam)
        if self.kind == KIND_SHIFTED:
            znew = grp.dilate(g, 1.0 / lam, np.asarray(self.z, dtype=float))
            return shifted(self.base.compose_dilation(g, lam), tuple(znew))
        if self.kind == KIND_COMBO:
            return combo([(coef, m.compose_dilation(g, lam)) for coef, m in self.members])
        raise InputError(f"unknown kind {self.kind!r}")


# ----------------------------------------------------------------------------
# constructors and spec parsing
# ----------------------------------------------------------------------------


def ball_indicator(a: float) -> TestFunction:
    if a <= 0:
        raise InputError("ball radius must be positive")
    return TestFunction(KIND_BALL, a=a, spec=f"ball:a={a:g}")


def power_function(c: float, s: float, lo: float = 0.0, hi: float = math.inf) -> TestFunction:
    if lo < 0 or hi <= lo:
        raise InputError("power support window must satisfy 0 <= lo < hi")
    parts = [f"pow:s={s:g}"]
    if c != 1.0:
        parts.append(f"c={c:g}")
    if lo > 0:
        parts.append(f"lo={lo:g}")
    if math.isfinite(hi):
        parts.append(f"cut={hi:g}")
    return TestFunction(KIND_POWER, c=c, s=s, lo=lo, hi=hi, spec=":".join(parts))


def gaussian(width: float = 1.0) -> TestFunction:
    if width <= 0:
        raise InputError("gaussian width must be positive")
    spec = "gauss" if width == 1.0 else f"gauss:w={width:g}"
    return TestFunction(KIND_GAUSSIAN, width=width, spec=spec)


def shifted(base: TestFunction, z: Sequence[float]) -> TestFunction:
    zt = tuple(float(v) for v in z)
    zs = ",".join(format(v, "g") for v in zt)
    return TestFunction(KIND_SHIFTED, base=base, z=zt, spec=f"shift:z={zs}:base={base.spec}")


def combo(members: Sequence[tuple[float, TestFunction]]) -> TestFunction:
    ms = tuple((float(coef), m) for coef, m in members)
    if not ms:
        raise InputError("combo needs at least one member")
    body = "+".join(f"{coef:g}*{m.spec}" for coef, m in ms)
    return TestFunction(KIND_COMBO, members=ms, spec=f"combo:{body}")


def parse_function(spec: str) -> TestFunction:
    """Parse "ball:a=1", "pow:s=-1[:c=..][:lo=..][:cut=..]", "gauss[:w=..]",
    "shift:z=1,0:base=<spec>", "combo:<coef>*<spec>[+<coef>*<spec>...]"."""
    s = spec.strip()
    head, _, rest = s.partition(":")
    if head == "ball":
        kv = _kvfloats(rest)
        return ball_indicator(kv.get("a", 1.0))
    if head == "pow":
        kv = _kvfloats(rest)
        return power_function(kv.get("c", 1.0), kv.get("s", 0.0),
                              lo=kv.get("lo", 0.0), hi=kv.get("cut", math.inf))
    if head == "gauss":
        kv = _kvfloats(rest) if rest else {}
        return gaussian(kv.get("w", 1.0))
    if head == "shift":
        z_part, sep, base_part = rest.partition(":base=")
        if not sep or not z_part.startswith("z="):
            raise InputError(f"shift spec needs z=...:base=...: {spec!r}")
        z = [float(v) for v in z_part[2:].split(",")]
        return shifted(parse_function(base_part), z)
    if head == "combo":
        members = []
        for item in rest.split("+"):
            coef, sep, sub = item.partition("*")
            if not sep:
                raise InputError(f"combo member needs coef*spec: {item!r}")
            members.append((float(coef), parse_function(sub)))
        return combo(members)
    raise InputError(f"unrecognised function spec: {spec!r}")


def _kvfloats(rest: str) -> dict:
    out = {}
    for part in rest.split(":"):
        if part:
            k, _, v = part.partition("=")
            out[k] = float(v)
    return out


# ----------------------------------------------------------------------------
# grid sampling
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class GridFunction:
    """Cell-centred samples of a function on the box [-L, L]^n."""

    g: grp.GroupDescriptor
    L: float
    res: tuple[int, ...]
    values: np.ndarray

    @property
    def cell_volume(self) -> float:
        return float(np.prod([2 * self.L / r for r in self.res]))

    def axis_coords(self, i: int) -> np.ndarray:
        r = self.res[i]
        return -self.L + (np.arange(r) + 0.5) * (2 * self.L / r)

    def lebesgue_norm(self, p: float) -> float:
        if p == math.inf:
            return float(np.max(np.abs(self.values)))
        return float((np.sum(np.abs(self.values) ** p) * self.cell_volume) ** (1.0 / p))


def sample_to_grid(
    f: TestFunction, g: grp.GroupDescriptor, L: float, res: Sequence[int] | int
) -> GridFunction:
    """Cell-centred samples on the uniform grid of [-L, L]^n.

    Cell centring keeps even resolutions away from power singularities at the
    origin.
    """
    if L <= 0:
        raise InputError("box half-width must be positive")
    if isinstance(res, int):
        res = (res,) * g.n
    res = tuple(int(r) for r in res)
    if len(res) != g.n or any(r < 2 for r in res):
        raise InputError("need a resolution >= 2 per axis")
    total = int(np.prod(res))
    if total > _GRID_BUDGET:
        raise ResourceError(f"grid of {total} cells exceeds the budget of {_GRID_BUDGET}")
    axes = [-L + (np.arange(r) + 0.5) * (2 * L / r) for r in res]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.reshape(-1) for m in mesh], axis=-1)
    vals = f.eval(g, pts).reshape(res)
    return GridFunction(g, float(L), res, vals)

"""Quadrature plans: every tunable knob of the numerical machinery in one place."""

from __future__ import annotations

from dataclasses import dataclass, replace, asdict

from .errors import InputError


@dataclass(frozen=True)
class QuadraturePlan:
    """Resolution and truncation budget for all quadratures.

    delta_min / r_max bound the convolution shells; shells_per_octave and
    nodes_per_shell set their resolution.  The remaining fields control the
    one-dimensional radial rule, sphere charts, sup-grids for norms and the
    Monte-Carlo sampler.  All defaults are desk scale.
    """

    delta_min: float = 2.0 ** -20
    r_max: float = 2.0 ** 16
    shells_per_octave: int = 2
    nodes_per_shell: int = 48
    mc_seed: int = 0
    tol: float = 1e-3

    # 1-D radial rule: Simpson intervals per octave (even).
    radial_intervals: int = 16
    # Gauss-Legendre nodes per radial sub-shell in convolution shells.
    shell_radial_gl: int = 2
    # sphere chart order (points per angular direction).
    sphere_order: int = 16
    # sup-grids: (points per octave, lo exponent, hi exponent), radii 2**k.
    norm_grid: tuple[int, int, int] = (2, -24, 24)
    maximal_grid: tuple[int, int, int] = (2, -12, 12)
    # octaves below r kept in ball-node sets.
    ball_inner_octaves: int = 16
    # Monte-Carlo sample budget.
    mc_budget: int = 1 << 24

    def __post_init__(self):
        if not (0 < self.delta_min < self.r_max):
            raise InputError("plan requires 0 < delta_min < r_max")
        if self.tol <= 0:
            raise InputError("plan tolerance must be positive")
        if self.shells_per_octave < 1 or self.nodes_per_shell < 2:
            raise InputError("plan shell resolution too small")

    def refined(self, factor: int = 2) -> "QuadraturePlan":
        """Plan with `factor`-times the quadrature effort (same truncations)."""
        return replace(
            self,
            shells_per_octave=self.shells_per_octave * factor,
            nodes_per_shell=self.nodes_per_shell * factor,
            radial_intervals=self.radial_intervals * factor,
            sphere_order=self.sphere_order * factor,
        )

    def coarsened(self) -> "QuadraturePlan":
        """Plan with roughly half the effort, used for error estimates."""
        return replace(
            self,
            shells_per_octave=max(1, self.shells_per_octave // 2),
            nodes_per_shell=max(2, self.nodes_per_shell // 2),
            radial_intervals=max(4, self.radial_intervals // 2),
            sphere_order=max(4, self.sphere_order // 2),
            shell_radial_gl=max(1, self.shell_radial_gl
                                if self.shells_per_octave > 1 else self.shell_radial_gl // 2),
        )

    def to_dict(self) -> dict:
        d = asdict(self)
        d["norm_grid"] = list(self.norm_grid)
        d["maximal_grid"] = list(self.maximal_grid)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "QuadraturePlan":
        kw = dict(d)
        for key in ("norm_grid", "maximal_grid"):
            if key in kw:
                kw[key] = tuple(kw[key])
        return cls(**kw)


DEFAULT_PLAN = QuadraturePlan()

"""The bundled verification suite: one validated case per statement.

Every case runs on a desk-scale plan; parameters are chosen so all hypotheses
hold and at least one family member has a closed-form norm on the box-ball
group, anchoring the quadrature.  Empirical constants are pinned in
data/regression_bounds.json; `verify --suite default` must not regress them.
"""

from __future__ import annotations

from .harness import TheoremCase

ANISO = "abelian:aniso:nu=1,2"
ISO2 = "abelian:iso:n=2"

FAMILY = ["ball:a=1", "pow:s=-1:cut=1", "gauss"]
COMPACT_FAMILY = ["ball:a=1", "shift:z=1,0:base=ball:a=1", "combo:1*ball:a=2+-0.5*ball:a=1"]


def _op_plan(**kw) -> dict:
    base = dict(
        tol=1e-3,
        shells_per_octave=1,
        sphere_order=8,
        delta_min=2.0**-14,
        r_max=2.0**16,
        radial_intervals=16,
        norm_grid=(2, -6, 6),
        maximal_grid=(2, -6, 6),
        ball_inner_octaves=12,
        mc_seed=0,
    )
    base.update(kw)
    return base


def default_cases(seed: int = 0, tol: float = 1e-3) -> list[TheoremCase]:
    plan_op = _op_plan(mc_seed=seed, tol=tol)

    def mk(theorem: str, group: str, params: dict, functions=None, plan=None) -> dict:
        return {
            "theorem": theorem,
            "group": group,
            "params": params,
            "functions": functions if functions is not None else [],
            "plan": plan if plan is not None else plan_op,
        }

    cases = [
        mk("kernel-membership", ANISO,
           {"alpha": 1.0, "gamma": 2.0, "p1": 1.2, "R": [0.5, 1.0, 2.0]}),
        mk("young", ISO2, {"p": 2.0, "q": 2.0, "p1": 1.0, "n_pairs": 20, "L": 4.0, "res": 64}),
        mk("maximal", ANISO, {"p": 2.0, "phi": "pow:c=1:beta=-1"}, FAMILY),
        mk("br-1", ANISO,
           {"alpha": 1.0, "gamma": 2.0, "p": 2.0, "p1": 1.2, "phi": "pow:c=1:beta=-1.25"},
           FAMILY),
        mk("br-2", ANISO,
           {"alpha": 1.0, "gamma": 2.0, "p": 2.0, "p1": 1.2, "p2": 1.0,
            "phi": "pow:c=1:beta=-1.25"},
           FAMILY),
        mk("br-3", ANISO,
           {"alpha": 1.5, "gamma": 3.0, "p": 1.25, "p2": 1.5,
            "phi": "pow:c=1:beta=-2", "omega": "pow:c=1:beta=-1.5"},
           FAMILY),
        mk("gbr", ANISO,
           {"gamma": 1.0, "p": 2.0, "q": 4.0,
            "rho": "pow:c=1:beta=-1.5", "phi": "pow:c=1:beta=-1"},
           FAMILY),
        mk("olsen-gbr", ANISO,
           {"gamma": 1.0, "p": 2.0, "p2": 4.0,
            "rho": "pow:c=1:beta=-1.5", "phi": "pow:c=1:beta=-1",
            "W": "combo:1*pow:s=-0.75:lo=1+1*ball:a=1"},
           FAMILY),
        mk("gfrac", ANISO,
           {"p": 2.0, "q": 4.0, "rho": "pow:c=1:beta=0.5", "phi": "pow:c=1:beta=-1"},
           FAMILY),
        mk("olsen-gfrac", ANISO,
           {"p": 2.0, "p2": 4.0, "rho": "pow:c=1:beta=0.5", "phi": "pow:c=1:beta=-1",
            "W": "combo:1*pow:s=-0.75:lo=1+1*ball:a=1"},
           FAMILY),
        mk("olsen-br", ANISO,
           {"alpha": 1.5, "gamma": 3.0, "p": 1.25, "p2_kernel": 1.5,
            "phi": "pow:c=1:beta=-2", "omega": "pow:c=1:beta=-1.5",
            "W": "combo:1*pow:s=-1.8:lo=1+1*ball:a=1"},
           FAMILY),
        mk("campanato", ANISO,
           {"p": 2.0, "rho": "pow:c=1:beta=0.5", "phi": "pow:c=1:beta=-0.5",
            "psi": "pow:c=1:beta=0"},
           COMPACT_FAMILY),
    ]
    return [TheoremCase.from_dict(d) for d in cases]

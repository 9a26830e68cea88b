import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from morreyops import (
    ConfigurationError,
    DivergenceError,
    InputError,
    abelian_aniso,
    abelian_iso,
    dilate,
    heisenberg1,
    inverse,
    multiply,
    parse_group,
    quasi_norm,
    radial_integrate,
    sphere_chart,
    sphere_measure,
)
from morreyops.plan import QuadraturePlan


def test_parse_group_specs():
    assert parse_group("abelian:iso:n=2").norm == "euclidean"
    assert parse_group("abelian:aniso:nu=1,2").weights == (1.0, 2.0)
    assert parse_group("heis1").law == "heisenberg1"
    with pytest.raises(InputError):
        parse_group("nonsense")


def test_descriptor_invariants(g_aniso, g_iso2, g_heis):
    for g in (g_aniso, g_iso2, g_heis):
        assert g.Q == sum(g.weights)
        assert math.isclose(g.sigma, g.Q * g.vol1, rel_tol=1e-12)
    assert g_aniso.vol1 == 4.0  # box ball
    assert g_heis.weights == (1.0, 1.0, 2.0) and g_heis.Q == 4.0


def test_multiply_abelian(g_iso2):
    assert np.allclose(multiply(g_iso2, [1, 2], [3, 4]), [4, 6])


def test_multiply_heisenberg(g_heis):
    assert np.allclose(multiply(g_heis, [1, 0, 0], [0, 1, 0]), [1, 1, 0.5])


def test_inverse_and_identity(g_heis, g_aniso):
    x = np.array([1.0, 2.0, 3.0])
    assert np.allclose(inverse(g_heis, x), [-1, -2, -3])
    assert np.allclose(multiply(g_heis, x, inverse(g_heis, x)), [0, 0, 0])
    assert np.allclose(inverse(g_aniso, [1.0, -2.0]), [-1.0, 2.0])
    assert np.allclose(inverse(g_aniso, [0.0, 0.0]), [0.0, 0.0])


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=9, max_size=9))
def test_heisenberg_associative(vals):
    g = heisenberg1()
    x, y, z = (np.array(vals[i : i + 3]) for i in (0, 3, 6))
    lhs = multiply(g, multiply(g, x, y), z)
    rhs = multiply(g, x, multiply(g, y, z))
    assert np.allclose(lhs, rhs, atol=1e-9)


def test_dilate(g_aniso, g_heis):
    assert np.allclose(dilate(g_aniso, 2.0, [1.0, 1.0]), [2.0, 4.0])
    assert np.allclose(dilate(g_aniso, 1.0, [0.3, -0.7]), [0.3, -0.7])
    assert np.allclose(dilate(g_heis, 3.0, [1.0, 1.0, 1.0]), [3.0, 3.0, 9.0])
    with pytest.raises(InputError):
        dilate(g_aniso, 0.0, [1.0, 1.0])


def test_dilate_is_automorphism(g_heis):
    rng = np.random.default_rng(3)
    x, y = rng.normal(size=3), rng.normal(size=3)
    lam = 1.7
    lhs = dilate(g_heis, lam, multiply(g_heis, x, y))
    rhs = multiply(g_heis, dilate(g_heis, lam, x), dilate(g_heis, lam, y))
    assert np.allclose(lhs, rhs)


def test_quasi_norm_values(g_aniso, g_heis):
    assert quasi_norm(g_aniso, [0.5, 0.09]) == pytest.approx(0.5)
    assert quasi_norm(g_heis, [0.0, 0.0, 1.0]) == pytest.approx(2.0)
    assert quasi_norm(g_aniso, [0.0, 0.0]) == 0.0


def test_quasi_norm_homogeneity(g_aniso, g_iso2, g_heis):
    rng = np.random.default_rng(0)
    for g in (g_aniso, g_iso2, g_heis):
        X = rng.normal(size=(40, g.n))
        base = quasi_norm(g, X)
        for lam in 2.0 ** np.arange(-8, 9):
            scaled = quasi_norm(g, dilate(g, lam, X))
            assert np.max(np.abs(scaled / (lam * base) - 1.0)) <= 1e-12


def test_quasi_norm_symmetry(g_aniso, g_iso2, g_heis):
    rng = np.random.default_rng(1)
    for g in (g_aniso, g_iso2, g_heis):
        X = rng.normal(size=(100, g.n))
        assert np.array_equal(quasi_norm(g, X), quasi_norm(g, inverse(g, X)))


def test_quasi_triangle_max_aniso(g_aniso):
    # (a+b)^(1/nu) <= a^(1/nu) + b^(1/nu) for nu >= 1 forces constant 1
    rng = np.random.default_rng(2)
    X = rng.normal(size=(1000, 2)) * 3
    Y = rng.normal(size=(1000, 2)) * 3
    lhs = quasi_norm(g_aniso, X + Y)
    rhs = quasi_norm(g_aniso, X) + quasi_norm(g_aniso, Y)
    assert np.all(lhs <= rhs * (1 + 1e-12))


def test_euclidean_norm_requires_isotropy():
    with pytest.raises(ConfigurationError):
        abelian_iso(5)  # charts only up to n = 3
    g = abelian_aniso([1, 2])
    assert g.norm == "max-aniso"


def test_sphere_measure_exact(g_aniso, g_iso2):
    assert sphere_measure(g_aniso).value == pytest.approx(12.0)
    assert sphere_measure(g_iso2).value == pytest.approx(2 * math.pi)
    assert sphere_measure(abelian_aniso([1, 2, 3])).value == pytest.approx(6 * 8)


def test_sphere_measure_koranyi_mc_oracle(g_heis):
    # independent brute-force volume of the gauge unit ball
    rng = np.random.default_rng(12345)
    n = 10_000_000
    pts = rng.random((n, 3))
    pts[:, :2] = pts[:, :2] * 2 - 1
    pts[:, 2] = pts[:, 2] * 0.5 - 0.25
    inside = (pts[:, 0] ** 2 + pts[:, 1] ** 2) ** 2 + 16 * pts[:, 2] ** 2 < 1.0
    vol_oracle = 2.0 * inside.mean()
    est = sphere_measure(g_heis, QuadraturePlan(tol=1e-3, mc_seed=0))
    assert est.value == pytest.approx(g_heis.Q * vol_oracle, rel=0.005)
    assert est.error <= 1e-3 * est.value
    # and the chart closed form agrees with the oracle too
    assert g_heis.vol1 == pytest.approx(vol_oracle, rel=0.005)


def test_sphere_chart_totals(g_aniso, g_iso2, g_heis):
    for g in (g_aniso, g_iso2, g_heis):
        W, wts = sphere_chart(g, 16)
        assert wts.sum() == pytest.approx(g.sigma, rel=1e-12)
        assert np.max(np.abs(quasi_norm(g, W) - 1.0)) < 1e-12


def test_radial_integrate_gaussian(g_aniso):
    res = radial_integrate(g_aniso, lambda t: np.exp(-(t**2)), 0.0, math.inf)
    assert res.value == pytest.approx(3 * math.sqrt(math.pi), rel=1e-5)
    assert abs(res.value - 3 * math.sqrt(math.pi)) <= max(res.error, 1e-7)


def test_radial_integrate_ball_volume(g_aniso):
    res = radial_integrate(g_aniso, lambda t: np.ones_like(t), 0.0, 1.0)
    assert res.value == pytest.approx(4.0, rel=1e-4)


def test_radial_integrate_divergence(g_aniso):
    with pytest.raises(DivergenceError):
        radial_integrate(g_aniso, lambda t: t ** (-g_aniso.Q), 0.0, 1.0)


def test_polar_identity_against_box_quadrature(g_aniso, g_iso2):
    # direct n-dimensional midpoint quadrature over a large box as oracle
    for g, width in ((g_aniso, (8.0, 64.0)), (g_iso2, (8.0, 8.0))):
        res = radial_integrate(g, lambda t: np.exp(-(t**2)), 0.0, math.inf)
        m = 1200
        axes = [
            -w + (np.arange(m) + 0.5) * (2 * w / m)
            for w in width
        ]
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([v.reshape(-1) for v in mesh], axis=-1)
        vals = np.exp(-quasi_norm(g, pts) ** 2)
        cell = np.prod([2 * w / m for w in width])
        oracle = float(vals.sum() * cell)
        assert res.value == pytest.approx(oracle, rel=0.005)


def test_haar_dilation_scaling(g_aniso, g_iso2):
    # measured |B(0, r)| tracks r^Q * vol1 (indicator counting on a fine grid)
    for g in (g_aniso, g_iso2):
        for r in (0.5, 1.0, 2.0):
            m = 1024
            width = [r ** w * 1.25 for w in g.weights]
            axes = [-w + (np.arange(m) + 0.5) * (2 * w / m) for w in width]
            mesh = np.meshgrid(*axes, indexing="ij")
            pts = np.stack([v.reshape(-1) for v in mesh], axis=-1)
            frac = (quasi_norm(g, pts) < r).mean()
            vol = frac * np.prod([2 * w for w in width])
            assert vol == pytest.approx(g.vol1 * r**g.Q, rel=0.005)

from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from quatdom import closed_forms as cf
from quatdom import domains as dm
from quatdom import qarray
from quatdom.montecarlo import mc_volume
from quatdom.quaternion import QMatrix

SPECS = [dm.RI(1, 1), dm.RI(2, 3), dm.RII(1), dm.RII(3), dm.RIII(1), dm.RIII(2), dm.SYM(1), dm.SYM(3), dm.RIV(1), dm.RIV(3)]


def test_real_dims():
    assert dm.RI(2, 3).real_dim == 24
    assert dm.RII(3).real_dim == 15
    assert dm.RIII(3).real_dim == 21
    assert dm.SYM(3).real_dim == 24
    assert dm.RIV(3).real_dim == 12
    assert dm.RIV(2).box_volume == 256.0


def test_spec_validation():
    with pytest.raises(ValueError):
        dm.DomainSpec("RV", n=1)
    with pytest.raises(ValueError):
        dm.RI(0, 1)
    with pytest.raises(ValueError):
        dm.DomainSpec("RII", n=2, m=2)


def test_materialize_examples():
    a = dm.materialize(dm.RII(1), [0.5])
    assert a.structure == "hermitian"
    assert np.array_equal(a.data, [[[0.5, 0, 0, 0]]])
    b = dm.materialize(dm.RIII(1), [0.1, 0.2, 0.3])
    assert np.array_equal(b.data, [[[0.0, 0.1, 0.2, 0.3]]])
    c = dm.materialize(dm.SYM(2), np.arange(12.0))
    assert c.shape == (2, 2)
    assert np.array_equal(c.data[0, 1], c.data[1, 0])
    assert np.array_equal(c.data[0, 1], [8, 9, 10, 11])
    h = dm.materialize(dm.RII(2), np.arange(6.0))
    assert np.array_equal(h.data[1, 0], [2, -3, -4, -5])
    k = dm.materialize(dm.RIII(2), np.arange(10.0))
    assert np.array_equal(k.data[1, 0], [-6, 7, 8, 9])


def test_materialize_length_mismatch():
    with pytest.raises(ValueError):
        dm.materialize(dm.RII(2), np.zeros(5))


@pytest.mark.parametrize("spec", SPECS, ids=lambda s: s.label())
@settings(max_examples=25, deadline=None)
@given(data=st.data())
def test_round_trip(spec, data):
    c = data.draw(arrays(float, spec.real_dim, elements=st.floats(-1, 1, allow_nan=False)))
    point = dm.materialize(spec, c)
    assert np.array_equal(dm.coordinates(spec, point), c)


@pytest.mark.parametrize("spec", SPECS, ids=lambda s: s.label())
def test_center_is_member(spec):
    assert dm.contains(spec, np.zeros(spec.real_dim))


def test_outside_unit_quaternion():
    q = np.array([1.01, 0, 0, 0])
    assert not dm.contains(dm.RI(1, 1), q)
    assert dm.contains(dm.RI(1, 1), q / 1.02)
    assert not dm.contains(dm.RIV(1), q)


def test_contains_accepts_qmatrix():
    assert dm.contains(dm.RII(1), QMatrix(np.array([[[0.5, 0, 0, 0]]]), "hermitian"))
    assert not dm.contains(dm.RII(1), QMatrix(np.array([[[1.5, 0, 0, 0]]]), "hermitian"))


# box tightness --------------------------------------------------------------------


def _boundary_scale(spec, q):
    """Largest t such that t*q lies in the closed domain (all kinds are circled)."""
    if spec.kind == "RIV":
        s, d, _ = dm.rIV_terms(q)
        return 1.0 / np.sqrt(s + np.sqrt(d))
    e = qarray.embed_matrix(q)
    if spec.kind in ("RI", "SYM"):
        return 1.0 / np.linalg.norm(e, ord=2, axis=(-2, -1))
    if spec.kind == "RII":
        rho = np.max(np.abs(np.linalg.eigvalsh(e)), axis=-1)
    else:
        rho = np.max(np.abs(np.linalg.eigvalsh(1j * e)), axis=-1)
    return 1.0 / rho


def _member_points(spec, rng, count):
    c = rng.normal(size=(count, spec.real_dim))
    q = dm.materialize_batch(spec, c)
    t = _boundary_scale(spec, q)
    # half the points hug the boundary, the rest fill the interior
    u = np.where(np.arange(count) % 2 == 0, 1 - 1e-9, rng.uniform(size=count))
    return c * (t * u)[:, None]


@pytest.mark.parametrize(
    "spec", [dm.RI(2, 2), dm.RII(2), dm.RIII(2), dm.SYM(2), dm.RIV(3)], ids=lambda s: s.label()
)
def test_box_tightness(spec, rng):
    pts = _member_points(spec, rng, 1_000_000)
    inside = dm.contains_batch(spec, pts)
    assert inside.mean() > 0.999
    q = dm.materialize_batch(spec, pts[inside])
    assert np.max(qarray.qnorm_sq(q)) <= (1 + 1e-12) ** 2


@pytest.mark.parametrize("spec", [dm.RI(1, 2), dm.RII(2), dm.RIII(1), dm.RIV(2)], ids=lambda s: s.label())
def test_box_tightness_by_rejection(spec, rng):
    pts = rng.uniform(-1.05, 1.05, size=(1_000_000, spec.real_dim))
    inside = dm.contains_batch(spec, pts)
    assert inside.sum() > 1000
    q = dm.materialize_batch(spec, pts[inside])
    assert np.max(qarray.qnorm_sq(q)) <= (1 + 1e-12) ** 2


@pytest.mark.parametrize("spec", SPECS, ids=lambda s: s.label())
def test_membership_is_even(spec, rng):
    pts = rng.uniform(-1, 1, size=(20000, spec.real_dim)) * 0.7
    assert np.array_equal(dm.contains_batch(spec, pts), dm.contains_batch(spec, -pts))


def test_sym_form_is_a_gram_matrix(rng):
    spec = dm.SYM(3)
    q = dm.materialize_batch(spec, rng.normal(size=(500, spec.real_dim)))
    q_bar = qarray.qconj(q)
    assert np.allclose(qarray.qmatmul(q, q_bar), qarray.qmatmul(q, qarray.adjoint(q)), atol=1e-12)


def test_rIV_discriminant_nonnegative(rng):
    for n in (2, 3, 5):
        q = rng.normal(size=(1_000_000 // 3, 1, n, 4))
        s = np.sum(q**2, axis=(-3, -2, -1))
        t = np.sum(qarray.qmul(q[:, 0], q[:, 0]), axis=-2)
        raw = s * s - qarray.qnorm_sq(t)
        assert np.min(raw / (s * s)) >= -1e-12
        _, d, ok = dm.rIV_terms(q)
        assert ok.all() and (d >= 0).all()


def test_rIV_matches_scalar_rule():
    # n = 1: the discriminant vanishes and the rule reduces to |q| < 1
    spec = dm.RIV(1)
    assert dm.contains(spec, [0.5, 0.5, 0.5, 0.49])
    assert not dm.contains(spec, [0.5, 0.5, 0.5, 0.51])


def test_rIV_real_and_imaginary_pair():
    # q = (x, iy): the discriminant is 4x^2y^2 and the rule becomes |x| + |y| < 1
    spec = dm.RIV(2)
    c = np.zeros(8)
    c[0], c[5] = 0.6, 0.39
    assert dm.contains(spec, c)
    c[5] = 0.41
    assert not dm.contains(spec, c)


def test_rIV_volume_by_rejection():
    est = mc_volume(dm.RIV(2), 1_000_000, seed=3)
    exact = cf.vol_RIV(2).to_float()
    assert abs(est.mean - exact) <= 3 * est.std_error


# integrands ------------------------------------------------------------------------


def test_integrand_examples():
    zero4 = np.zeros(4)
    assert dm.integrand(cf.J_rect(1, 1, 3), zero4) == 1.0
    assert dm.integrand(cf.K_rect(1, 1, 4), zero4) == 1.0
    assert dm.integrand(cf.K_rect(1, 1, 4), np.array([0.5, 0.5, 0.5, 0.5])) == pytest.approx(2.0**-4, rel=1e-15)
    assert dm.integrand(cf.J_rect(1, 1, 2), np.array([0.5, 0, 0, 0])) == pytest.approx(0.75**2, rel=1e-15)
    assert dm.integrand(cf.H_herm(1, 2), np.array([2.0])) == pytest.approx(1 / 25, rel=1e-15)
    assert dm.integrand(cf.L_four(1, 1, 1), np.array([0.5, 0, 0, 0])) == pytest.approx(0.75**2, rel=1e-15)


def test_integrand_outside_raises():
    with pytest.raises(ValueError):
        dm.integrand(cf.J_rect(1, 1, F(1, 2)), np.array([1.01, 0, 0, 0]))
    # integer exponent is well defined anywhere
    assert dm.integrand(cf.J_rect(1, 1, 1), np.array([2.0, 0, 0, 0])) == pytest.approx(-3.0)


@pytest.mark.parametrize(
    "family",
    [cf.J_rect(2, 2, F(3, 2)), cf.I_herm(2, 1), cf.J_sym(2, F(1, 2)), cf.K_anti(2, 2), cf.L_four(3, 1, F(1, 2))],
    ids=lambda f: f.label(),
)
def test_lambda_zero_is_indicator_and_batch_matches_scalar(family, rng):
    spec = dm.domain_of(family)
    pts = _member_points(spec, rng, 200) * 0.9
    batch = dm.integrand_batch(family, pts)
    single = np.array([dm.integrand(family, p) for p in pts])
    assert np.allclose(batch, single, rtol=1e-10)
    assert (batch > 0).all()
    zero = {"alpha": 0, "beta": 0} if family.tag == "L_four" else {"lam": 0}
    flat = cf.FormulaFamily(family.tag, m=family.m, n=family.n, **zero)
    assert np.array_equal(dm.integrand_batch(flat, pts), np.ones(len(pts)))
    # even rows sit on the boundary before the 0.9 shrink
    outside = pts[::2] / 0.9 * 1.1
    assert np.array_equal(dm.integrand_batch(family, outside), np.zeros(len(outside)))


def test_unbounded_integrands_everywhere(rng):
    for family in (cf.K_rect(2, 2, 8), cf.H_herm(2, 6)):
        spec = dm.domain_of(family)
        pts = rng.normal(scale=5, size=(300, spec.real_dim))
        v = dm.integrand_batch(family, pts)
        assert ((v > 0) & (v <= 1)).all()
        assert np.allclose(v, [dm.integrand(family, p) for p in pts], rtol=1e-10)


def test_domain_of():
    assert dm.domain_of(cf.J_rect(2, 3)) == dm.RI(2, 3)
    assert dm.domain_of(cf.K_anti(2)) == dm.RIII(2)
    assert dm.domain_of(cf.L_four(3)) == dm.RIV(3)

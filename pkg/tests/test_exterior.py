import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from strategies import kforms, metrics

from covariant_em import exterior as ext
from covariant_em.exterior import KForm, Metric, constant_field, ext_deriv_fd, hodge, wedge

# ---------------------------------------------------------------- oracles


def perm_sign(p):
    p, sign = list(p), 1
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


def alternate(T):
    """Antisymmetrize a full array over all of its indices (brute force)."""
    k = T.ndim
    out = np.zeros_like(T)
    for p in itertools.permutations(range(k)):
        out += perm_sign(p) * np.transpose(T, p)
    return out / math.factorial(k)


def wedge_oracle(a, b):
    A, B = a.to_array(), b.to_array()
    p, q = a.degree, b.degree
    T = np.multiply.outer(A, B) if p and q else A * B
    coeff = math.factorial(p + q) / (math.factorial(p) * math.factorial(q))
    return coeff * alternate(np.asarray(T)) if p + q else np.asarray(T)


def hodge_oracle(w, g):
    """(*w)_{b..} = 1/k! w^{a..} sqrt|g| eps_{a..b..} via explicit loops."""
    k = w.degree
    W = w.to_array()
    gi = g.inverse
    out = np.zeros((4,) * (4 - k))
    for up in itertools.product(range(4), repeat=k):
        # raise every index by explicit summation
        raised = 0.0
        for low in itertools.product(range(4), repeat=k):
            factor = np.prod([gi[u, l] for u, l in zip(up, low)]) if k else 1.0
            raised += factor * (W[low] if k else W)
        for rest in itertools.product(range(4), repeat=4 - k):
            idx = up + rest
            if len(set(idx)) < 4:
                continue
            out[rest] += raised * perm_sign(idx)
    return math.sqrt(abs(g.det)) * out / math.factorial(k)


# ---------------------------------------------------------------- metric


def test_metric_rejects_bad_input():
    with pytest.raises(ValueError, match="4x4"):
        Metric(np.eye(3))
    with pytest.raises(ValueError, match="symmetric"):
        Metric(np.diag([-1.0, 1, 1, 1]) + np.triu(np.ones((4, 4)), 1) * 0.1)
    with pytest.raises(ValueError, match="degenerate"):
        Metric(np.diag([-1.0, 1, 1, 0]))
    with pytest.raises(ValueError):
        Metric(np.diag([1.0, 1, 1, 1]))  # Riemannian
    with pytest.raises(ValueError):
        Metric(np.diag([-1.0, -1, 1, 1]))
    with pytest.raises(ValueError, match="non-finite"):
        Metric(np.diag([-1.0, np.nan, 1, 1]))


def test_metric_accessors():
    g = Metric.diagonal([-4.0, 1.0, 9.0, 1.0])
    assert g.sqrt_abs_det == pytest.approx(6.0)
    assert np.allclose(g.inverse, np.diag([-0.25, 1, 1 / 9, 1]))
    assert Metric.minkowski().is_flat() and not g.is_flat()


def test_constants_presets():
    assert ext.NATURAL.c == 1.0 and ext.NATURAL.eps0 == 1.0
    assert ext.SI.mu0 * ext.SI.eps0 * ext.SI.c**2 == pytest.approx(1.0, rel=1e-15)
    with pytest.raises(ValueError):
        ext.Constants(-1.0, 1.0)


# ---------------------------------------------------------------- forms


def test_kform_shape_validated():
    with pytest.raises(ValueError):
        KForm(2, np.zeros(4))
    with pytest.raises(ValueError):
        KForm(5, np.zeros(1))


def test_basis_and_array_roundtrip(rng):
    w = KForm(2, rng.normal(size=6))
    A = w.to_array()
    assert np.allclose(A, -A.T)
    assert KForm.from_array(A).allclose(w)
    assert KForm.basis(1, 0).components.tolist() == [-1, 0, 0, 0, 0, 0]
    assert KForm.basis(0, 0).norm() == 0.0


@pytest.mark.parametrize("p,q", [(0, 2), (1, 1), (1, 2), (2, 2), (1, 3), (2, 1)])
def test_wedge_matches_brute_force_antisymmetrization(rng, p, q):
    for _ in range(5):
        a = KForm(p, rng.normal(size=math.comb(4, p)))
        b = KForm(q, rng.normal(size=math.comb(4, q)))
        assert np.allclose(wedge(a, b).to_array(), wedge_oracle(a, b), atol=1e-13)


def test_wedge_frozen_values():
    dx = [KForm.basis(i) for i in range(4)]
    assert wedge(dx[0], dx[1]).components.tolist() == [1, 0, 0, 0, 0, 0]
    assert wedge(dx[1], dx[0]).components.tolist() == [-1, 0, 0, 0, 0, 0]
    top = wedge(wedge(dx[2], dx[0]), wedge(dx[3], dx[1]))
    assert top.scalar == -1.0  # 2031 is an odd permutation of 0123
    with pytest.raises(ValueError):
        wedge(KForm.basis(0, 1, 2), KForm.basis(0, 1))


def test_interior_contracts_first_slot():
    X = np.array([0.0, 1.0, 0.0, 0.0])
    assert ext.interior(X, KForm.basis(1, 2)).components.tolist() == [0, 0, 1, 0]
    assert ext.interior(X, KForm.basis(2, 1)).components.tolist() == [0, 0, -1, 0]
    with pytest.raises(ValueError):
        ext.interior(X, KForm(0, np.array([1.0])))


def test_flat_sharp(metric, rng):
    X = rng.normal(size=4)
    a = ext.flat(X, metric)
    assert np.allclose(a.components, metric.components @ X)
    assert np.allclose(ext.sharp(a, metric), X, rtol=1e-12)


# ---------------------------------------------------------------- hodge


@pytest.mark.parametrize("k", range(5))
def test_hodge_matches_epsilon_sum(metric, rng, k):
    w = KForm(k, rng.normal(size=math.comb(4, k)))
    star = hodge(w, metric)
    expected = hodge_oracle(w, metric)
    assert np.allclose(star.to_array(), expected, atol=1e-12)


def test_hodge_frozen_minkowski_values(eta):
    # hand evaluation of (1/k!) w^{a..} eps_{a..b..} with eps_0123 = +1
    assert hodge(KForm(0, np.array([1.0])), eta).components.tolist() == [1.0]
    assert hodge(KForm.basis(0), eta).components.tolist() == [0, 0, 0, -1]
    assert hodge(KForm.basis(1), eta).components.tolist() == [0, 0, -1, 0]
    assert hodge(KForm.basis(0, 1), eta).components.tolist() == [0, 0, 0, 0, 0, -1]
    assert hodge(KForm.basis(2, 3), eta).components.tolist() == [1, 0, 0, 0, 0, 0]
    assert hodge(ext.volume_form(eta), eta).scalar == -1.0


@pytest.mark.parametrize("k", range(5))
def test_hodge_involution_sign(metric, rng, k):
    w = KForm(k, rng.normal(size=math.comb(4, k)))
    sign = -((-1) ** (k * (4 - k)))
    assert hodge(hodge(w, metric), metric).allclose(sign * w, rtol=1e-12)


@given(kforms(2), kforms(2), metrics())
def test_wedge_star_is_inner_product(a, b, g):
    lhs = wedge(a, hodge(b, g)).scalar
    rhs = ext.inner(a, b, g) * g.sqrt_abs_det
    scale = a.norm() * b.norm() * max(1.0, np.abs(g.inverse).max() ** 2) * g.sqrt_abs_det
    assert abs(lhs - rhs) <= 1e-12 * max(scale, 1e-300)


@given(kforms(1), kforms(3), metrics())
def test_graded_commutativity(a, b, g):
    assert wedge(a, b).allclose(-wedge(b, a), rtol=1e-12, atol=1e-12)


def test_volume_form_orientation(metric):
    vol = ext.volume_form(metric)
    assert vol.scalar == pytest.approx(metric.sqrt_abs_det, rel=1e-14)


def test_contract_pair_matches_full_array(metric, rng):
    a = KForm(2, rng.normal(size=6))
    b = KForm(2, rng.normal(size=6))
    A, B = a.to_array(), b.to_array()
    expected = np.einsum("ca,cd,db->ab", A, metric.inverse, B)
    assert np.allclose(ext.contract_pair(a, b, metric), expected, atol=1e-13)


# ---------------------------------------------------------------- derivative


def test_ext_deriv_exact_on_linear_fields():
    # d(x0 dx1) = dx0 ^ dx1
    f = ext.FormField(lambda x: KForm(1, np.array([0.0, x[0], 0.0, 0.0])), 1)
    assert ext_deriv_fd(f, np.zeros(4)).allclose(KForm.basis(0, 1), atol=1e-12)
    # d of a function is its gradient
    s = ext.FormField(lambda x: KForm(0, np.array([3 * x[2] - x[3]])), 0)
    assert np.allclose(ext_deriv_fd(s, np.ones(4)).components, [0, 0, 3, -1])


def test_ext_deriv_validation():
    f = constant_field(ext.volume_form(Metric.minkowski()))
    with pytest.raises(ValueError, match="4-form"):
        ext_deriv_fd(f, np.zeros(4))
    g = constant_field(KForm.basis(0))
    with pytest.raises(ValueError, match="positive"):
        ext_deriv_fd(g, np.zeros(4), h=0.0)


def test_ext_deriv_second_order_convergence():
    f = ext.FormField(lambda x: KForm(1, np.array([0.0, math.sin(x[0] + 2 * x[2]), 0, 0])), 1)
    x = np.array([0.3, 0.1, -0.2, 0.4])
    exact = KForm(2, np.array([math.cos(0.3 - 0.4), 0, 0, -2 * math.cos(0.3 - 0.4), 0, 0]))
    errs = [(ext_deriv_fd(f, x, h) - exact).norm() for h in (1e-2, 5e-3)]
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.05)
    rich = (ext_deriv_fd(f, x, 1e-2, richardson=True) - exact).norm()
    assert rich < errs[1] / 100

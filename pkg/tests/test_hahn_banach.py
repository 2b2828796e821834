import numpy as np
import pytest
from scipy.optimize import linprog

from normlab.core import COMPLEX, FiniteSet, FnOnE
from normlab.duality import dual_norm
from normlab.errors import InvalidBound, NotNewDirection, Unsupported
from normlab.hahn_banach import (PartialFunctional, Subspace, extend_functional,
                                 extend_one_dimension, extend_vector_valued,
                                 extend_with_certificate, minimal_bound)
from normlab.norms import (EllipsoidNorm, L1Norm, LinfNorm, LpNorm, PolyFacetNorm,
                           PolyVertexNorm)
from normlab.operators import opnorm_V_to_linf

W11 = Subspace(2, [[1.0, 1.0]])


def test_minimal_bound_examples():
    assert minimal_bound(L1Norm(2), W11, [2.0]) == pytest.approx(1.0, abs=1e-12)
    assert minimal_bound(LinfNorm(3), Subspace(3, [[1, 0, 0], [0, 1, 1]]), [0.0, 0.0]) == 0
    rng = np.random.default_rng(0)
    spec = PolyFacetNorm(rng.standard_normal((5, 3)))
    lam = rng.standard_normal(3)
    full = Subspace(3, np.eye(3))
    assert minimal_bound(spec, full, lam) == pytest.approx(dual_norm(spec, lam).value, rel=1e-9)


def test_one_step_examples():
    (lo, hi), ext = extend_one_dimension(L1Norm(2), PartialFunctional(W11, [2.0], 1.0), [1.0, 0.0])
    assert lo == pytest.approx(1.0, abs=1e-12) and hi == pytest.approx(1.0, abs=1e-12)
    (lo, hi), ext = extend_one_dimension(L1Norm(2), PartialFunctional(Subspace(2), [], 1.0), [0.0, 1.0])
    assert (lo, hi) == pytest.approx((-1.0, 1.0)) and ext.values[-1] == pytest.approx(0.0)
    (lo, hi), _ = extend_one_dimension(L1Norm(2), PartialFunctional(W11, [0.0], 0.0), [1.0, 0.0])
    assert (lo, hi) == pytest.approx((0.0, 0.0), abs=1e-12)
    with pytest.raises(NotNewDirection):
        extend_one_dimension(L1Norm(2), PartialFunctional(W11, [2.0], 1.0), [2.0, 2.0])


def test_extension_examples():
    lam = extend_functional(L1Norm(2), PartialFunctional(W11, [2.0], 1.0))
    assert np.abs(lam.coeffs - [1.0, 1.0]).max() <= 1e-12
    lam = extend_functional(LinfNorm(2), PartialFunctional(Subspace(2, [[1.0, 0.0]]), [1.0], 1.0))
    assert lam.coeffs == pytest.approx([1.0, 0.0], abs=1e-12)
    full = Subspace(3, np.eye(3))
    lam = extend_functional(L1Norm(3), PartialFunctional(full, [0.5, -0.2, 0.1], 1.0))
    assert lam.coeffs == pytest.approx([0.5, -0.2, 0.1], abs=1e-12)


def test_bound_too_small_rejected():
    with pytest.raises(InvalidBound):
        extend_with_certificate(L1Norm(2), PartialFunctional(W11, [2.0], 0.5))


def test_lp_interval_against_scipy():
    # c_max = min over a in R^k of L||aB + z|| - y.a, computed with scipy as an LP in (a, t)
    rng = np.random.default_rng(1)
    F = rng.standard_normal((6, 3))
    spec = PolyFacetNorm(F)
    B = rng.standard_normal((1, 3))
    W = Subspace(3, B)
    y = np.array([0.7])
    L = minimal_bound(spec, W, y) * 1.3
    z = np.array([0.0, 0.0, 1.0])
    (lo, hi), _ = extend_one_dimension(spec, PartialFunctional(W, y, L), z)
    # variables a (free), r >= 0 with |F (aB + z)| <= r
    FB, Fz = F @ B.T, F @ z
    A_ub = np.vstack([np.hstack([FB, -np.ones((6, 1))]), np.hstack([-FB, -np.ones((6, 1))])])
    b_ub = np.concatenate([-Fz, Fz])
    top = linprog(np.concatenate([-y, [L]]), A_ub=A_ub, b_ub=b_ub,
                  bounds=[(None, None), (0, None)], method="highs")
    # c_min = max over a of -L||aB + z|| - y.a
    bottom = linprog(np.concatenate([y, [L]]), A_ub=A_ub, b_ub=b_ub,
                     bounds=[(None, None), (0, None)], method="highs")
    assert hi == pytest.approx(top.fun, rel=1e-8, abs=1e-10)
    assert lo == pytest.approx(-bottom.fun, rel=1e-8, abs=1e-10)
    assert lo <= hi + 1e-9


@pytest.mark.parametrize("spec", [
    L1Norm(3), LinfNorm(3), LpNorm(3, 2.0), EllipsoidNorm([[2.0, 0.3, 0], [0.3, 1, 0], [0, 0, 3]]),
    PolyVertexNorm([[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, -1]]),
    PolyFacetNorm([[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 2, -1]]),
])
def test_random_extensions_certified(spec):
    rng = np.random.default_rng(2)
    for _ in range(15):
        k = int(rng.integers(0, 3))
        W = Subspace(3, rng.standard_normal((k, 3)) if k else np.zeros((0, 3)))
        y = rng.standard_normal(k)
        L0 = minimal_bound(spec, W, y)
        L = L0 if k and rng.random() < 0.5 else max(L0 * 1.5, 0.5)
        res = extend_with_certificate(spec, PartialFunctional(W, y, L))
        assert res.restriction_error <= 1e-9
        assert res.ball_violation <= 1e-8
        assert all(s.c_min <= s.c_max + 1e-9 for s in res.steps)


def test_complex_ellipsoid_extension():
    G = np.array([[2.0, 0.5j], [-0.5j, 1.0]])
    spec = EllipsoidNorm(G)
    W = Subspace(2, [[1.0, 1j]])
    y = np.array([0.5 - 1j])
    res = extend_with_certificate(spec, PartialFunctional(W, y))
    assert abs(W.basis[0] @ res.functional.coeffs - y[0]) <= 1e-9
    assert res.extended_dual_norm == pytest.approx(res.minimal_bound, rel=1e-9)


def test_complex_polyhedral_unsupported():
    with pytest.raises(Unsupported):
        extend_with_certificate(L1Norm(2, COMPLEX), PartialFunctional(Subspace(2, [[1, 1j]]), [1.0]))
    with pytest.raises(Unsupported):
        extend_with_certificate(LpNorm(2, 3.0), PartialFunctional(Subspace(2, [[1, 0]]), [1.0]))


def test_vector_valued_extension():
    E = FiniteSet(["p", "q"])
    images = [FnOnE(E, [2.0, 2.0])]
    T = extend_vector_valued(L1Norm(2), W11, images, 1.0)
    assert T.rows == pytest.approx(np.array([[1.0, 1.0], [1.0, 1.0]]), abs=1e-12)
    assert opnorm_V_to_linf(T, L1Norm(2)).value <= 1 + 1e-9
    zero = extend_vector_valued(L1Norm(2), W11, [FnOnE(E, [0.0, 0.0])], 1.0)
    assert np.abs(zero.rows).max() == 0
    one = extend_vector_valued(L1Norm(2), W11, [FnOnE(FiniteSet(["x"]), [2.0])], 1.0)
    single = extend_functional(L1Norm(2), PartialFunctional(W11, [2.0], 1.0))
    assert one.rows[0] == pytest.approx(single.coeffs)
    with pytest.raises(InvalidBound) as err:
        extend_vector_valued(L1Norm(2), W11, [FnOnE(E, [1.0, 5.0])], 1.0)
    assert err.value.context["label"] == "q"

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog

from normlab.core import COMPLEX, FiniteSet, FnOnE
from normlab.duality import dual_norm, norming_functional, phi_embedding_check, polar_dual_spec
from normlab.errors import InvalidSample, ZeroVector
from normlab.norms import (EllipsoidNorm, L1Norm, LinfNorm, LpNorm, PolyFacetNorm,
                           PolyVertexNorm)
from normlab.operators import (MapFromFunctions, MapToFunctions, apply_from, apply_to,
                               opnorm_V_to_linf, opnorm_l1_to_V)
from normlab.optimize import LP_METHOD, maximize_over_ball, maximize_over_ball_ex
from normlab.verify import dual_norm_oracle


# -- optimize ----------------------------------------------------------------------

def test_maximize_examples():
    value, w = maximize_over_ball(L1Norm(2), [3, -4])
    assert value == 4 and w.tolist() == [0, -1]
    value, w = maximize_over_ball(LinfNorm(2), [3, -4])
    assert value == 7 and w.tolist() == [1, -1]
    value, w = maximize_over_ball(EllipsoidNorm.identity(2), [3, 4])
    assert value == pytest.approx(5) and w == pytest.approx([0.6, 0.8])


def test_facet_ball_lp_route_matches_vertices():
    rng = np.random.default_rng(4)
    spec = PolyFacetNorm(rng.standard_normal((7, 3)))
    for c in rng.standard_normal((20, 3)):
        v1, _, _ = maximize_over_ball_ex(spec, c)
        v2, w2, method = maximize_over_ball_ex(spec, c, prefer_lp=True)
        assert method == LP_METHOD
        assert v1 == pytest.approx(v2, rel=1e-9)
        assert spec(w2) <= 1 + 1e-9


# -- dual norms ----------------------------------------------------------------------

def test_dual_examples():
    assert dual_norm(L1Norm(3), [1, -2, 3]).value == 3
    assert dual_norm(LinfNorm(2), [3, -4]).value == 7
    res = dual_norm(L1Norm(2), [0, 0])
    assert res.value == 0 and L1Norm(2)(res.witness) <= 1


def test_dual_polytope_against_scipy():
    rng = np.random.default_rng(5)
    F = rng.standard_normal((6, 3))
    spec = PolyFacetNorm(F)
    for lam in rng.standard_normal((20, 3)):
        res = linprog(-lam, A_ub=np.vstack([F, -F]), b_ub=np.ones(12),
                      bounds=[(None, None)] * 3, method="highs")
        assert dual_norm(spec, lam).value == pytest.approx(-res.fun, rel=1e-9)


@pytest.mark.parametrize("spec", [
    LpNorm(3, 3.0), LpNorm(2, 1.3), EllipsoidNorm([[2.0, 0.4], [0.4, 1.0]]),
    LpNorm(3, 2.5, COMPLEX), EllipsoidNorm([[2.0, 1j], [-1j, 3.0]]),
])
def test_closed_form_duals(spec):
    rng = np.random.default_rng(6)
    for _ in range(50):
        lam = rng.standard_normal(spec.dim)
        if spec.field == COMPLEX:
            lam = lam + 1j * rng.standard_normal(spec.dim)
        res = dual_norm(spec, lam)
        assert res.value == pytest.approx(dual_norm_oracle(spec, lam), rel=1e-9)
        assert abs(res.witness @ lam) == pytest.approx(res.value, rel=1e-9)
        assert spec(res.witness) <= 1 + 1e-9


def test_norming_examples():
    lam = norming_functional(L1Norm(3), [1, -2, 3])
    assert lam.coeffs.tolist() == [1, -1, 1]
    assert norming_functional(EllipsoidNorm.identity(2), [3, 4]).coeffs == pytest.approx([0.6, 0.8])
    assert norming_functional(LinfNorm(2), [1, 1]).coeffs.tolist() == [1, 0]
    with pytest.raises(ZeroVector):
        norming_functional(L1Norm(2), [0, 0])


@settings(max_examples=150, deadline=None)
@given(st.lists(st.floats(-100, 100, allow_nan=False), min_size=3, max_size=3)
       .filter(lambda v: max(abs(x) for x in v) > 1e-3))
def test_norming_property(v):
    v = np.array(v)
    for spec in (L1Norm(3), LinfNorm(3), LpNorm(3, 3.0), EllipsoidNorm([[2, 0, 1], [0, 1, 0], [1, 0, 3]]),
                 PolyVertexNorm([[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1]]),
                 PolyFacetNorm([[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, -1, 1]])):
        lam = norming_functional(spec, v)
        assert dual_norm(spec, lam).value == pytest.approx(1.0, abs=1e-9)
        assert lam(v) == pytest.approx(spec(v), rel=1e-9)


def test_phi_embedding():
    spec = L1Norm(2)
    v = np.array([1.0, -2.0])
    rep = phi_embedding_check(spec, v, [norming_functional(spec, v)])
    assert rep.lhs == pytest.approx(3.0) and rep.holds and rep.detail["attained"]
    rep = phi_embedding_check(spec, np.zeros(2), [np.array([1.0, 0.0])])
    assert rep.lhs == 0
    rng = np.random.default_rng(0)
    sample = [u / np.abs(u).max() for u in rng.standard_normal((30, 2))]
    rep = phi_embedding_check(spec, v, sample)
    assert rep.holds and rep.lhs <= 3.0
    with pytest.raises(InvalidSample):
        phi_embedding_check(spec, v, [np.array([2.0, 0.0])])


def test_polarity():
    assert polar_dual_spec(L1Norm(2)) == LinfNorm(2)
    G = np.array([[2.0, 0.5], [0.5, 1.0]])
    polar = polar_dual_spec(EllipsoidNorm(G))
    assert polar.gram == pytest.approx(np.linalg.inv(G))
    rng = np.random.default_rng(7)
    spec = PolyVertexNorm(rng.standard_normal((5, 3)))
    twice = polar_dual_spec(polar_dual_spec(spec))
    for v in rng.standard_normal((40, 3)):
        assert twice(v) == pytest.approx(spec(v), rel=1e-9)
        lam = rng.standard_normal(3)
        assert polar_dual_spec(spec)(lam) == pytest.approx(dual_norm(spec, lam).value, rel=1e-9)


# -- operators ------------------------------------------------------------------------

E2 = FiniteSet(["a", "b"])


def test_apply_examples():
    A = MapFromFunctions(E2, [[1, 2], [3, 0]])
    assert apply_from(A, FnOnE(E2, [1, 0])).tolist() == [1, 2]
    assert apply_from(A, FnOnE(E2, [1, 1])).tolist() == [4, 2]
    assert apply_from(A, FnOnE(E2, [0, 0])).tolist() == [0, 0]
    T = MapToFunctions(E2, [[1, 2], [0, -3]])
    assert apply_to(T, [1, 1]).values.tolist() == [3, -3]
    assert apply_to(T, [0, 0]).values.tolist() == [0, 0]
    single = MapToFunctions(FiniteSet(["x"]), [[2, -1]])
    assert apply_to(single, [3, 1]).values.tolist() == [5]


def test_opnorm_examples():
    A = MapFromFunctions(E2, [[1, 2], [3, 0]])
    r = opnorm_l1_to_V(A, LinfNorm(2))
    assert (r.value, r.witness_label) == (3, "b")
    r = opnorm_l1_to_V(A, L1Norm(2))
    assert (r.value, r.witness_label) == (3, "a")
    assert opnorm_l1_to_V(MapFromFunctions(E2, np.zeros((2, 2))), L1Norm(2)).value == 0
    T = MapToFunctions(E2, [[1, 2], [0, -3]])
    r = opnorm_V_to_linf(T, L1Norm(2))
    assert (r.value, r.witness_label) == (3, "b")
    r = opnorm_V_to_linf(T, LinfNorm(2))
    assert (r.value, r.witness_label) == (3, "a")
    assert opnorm_V_to_linf(MapToFunctions(E2, np.zeros((2, 2))), L1Norm(2)).value == 0


def test_opnorm_audit_ratio_bounded():
    rng = np.random.default_rng(8)
    spec = EllipsoidNorm([[2.0, 0.3], [0.3, 1.0]])
    A = MapFromFunctions(FiniteSet(list("abcd")), rng.standard_normal((4, 2)))
    r = opnorm_l1_to_V(A, spec, audit=200)
    assert r.audit_ratio <= r.value * (1 + 1e-9)

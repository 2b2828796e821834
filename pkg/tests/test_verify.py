import math

import numpy as np
import pytest

from normlab import verify
from normlab.core import COMPLEX
from normlab.errors import GeneratorExhausted, MalformedInput, TooLarge
from normlab.io import dumps
from normlab.measures import DiscreteMeasure, MeasureNormResult, canonicalize, tv_norm
from normlab.norms import L1Norm, LinfNorm, PolyFacetNorm
from normlab.verify import (PropertyCase, brute_force_tv, default_cases, facet_vertices_bruteforce,
                            random_measure, run_case, run_suite, slack)


def test_slack_definition():
    assert slack(1.0, 2.0, "le") == -0.5
    assert slack(2.0, 2.0, "eq") == 0.0
    assert slack(1e-13, 0.0, "le") == pytest.approx(0.1)


def test_brute_force_rejects_large_measures():
    rng = np.random.default_rng(0)
    spec = L1Norm(3)
    pts = np.array([p / np.abs(p).sum() for p in rng.standard_normal((13, 3))])
    with pytest.raises(TooLarge):
        brute_force_tv(DiscreteMeasure(spec, pts, np.ones(13)))
    cpts = pts[:7].astype(complex)
    with pytest.raises(TooLarge):
        brute_force_tv(DiscreteMeasure(L1Norm(3, COMPLEX), cpts, np.ones(7)))


def test_adversarial_generator_produces_near_duplicates():
    rng = np.random.default_rng(1)
    merged = 0
    for _ in range(50):
        mu = random_measure(rng, LinfNorm(2), 12, adversarial=True)
        merged += len(mu) - len(canonicalize(mu))
    assert merged > 0


def test_facet_vertices_bruteforce_square():
    verts = facet_vertices_bruteforce(np.eye(2))
    assert sorted(map(tuple, np.round(verts, 12).tolist())) == [(-1, -1), (-1, 1), (1, -1), (1, 1)]
    spec = PolyFacetNorm([[1, 0], [0, 1], [1, 1]])
    assert len(facet_vertices_bruteforce(spec.functionals)) == 6


@pytest.mark.parametrize("eq", verify.EQUATION_IDS)
def test_every_property_passes(eq):
    res = run_case(PropertyCase(eq, 60, 5))
    assert res.passed, res.counterexample
    assert res.worst_slack is not None and res.worst_slack <= verify.PASS_SLACK


def test_barycenter_bound_across_dims():
    res = run_case(PropertyCase("E18", 1000, 0, {"dims": [2, 5]}))
    assert res.passed and res.worst_ratio <= 1.0 + verify.PASS_SLACK


def test_extension_on_full_subspace():
    res = run_case(PropertyCase("E8", 50, 2, {"subspace": "full"}))
    assert res.passed


def test_complex_total_variation_case():
    res = run_case(PropertyCase("E13", 20, 3, {"field": COMPLEX, "max_atoms": 5}))
    assert res.passed


def test_naive_total_variation_is_caught_and_shrunk():
    naive = {"tv_norm": lambda mu: MeasureNormResult(math.fsum(np.abs(mu.weights)))}
    res = run_case(PropertyCase("E13", 200, 0, {"adversarial": True}), implementations=naive)
    assert not res.passed and res.violations > 0
    atoms = res.counterexample["instance"]["measure"]["atoms"]
    assert len(atoms) == 2
    (p, w), (q, z) = [(np.array(a["point"]), a["weight"]) for a in atoms]
    assert np.abs(p - q).max() <= 1e-9 and w == -z


def test_suite_is_deterministic():
    cases = [PropertyCase("E13", 40, 1, {"adversarial": True}), PropertyCase("E4", 20, 2),
             PropertyCase("E8", 10, 3)]
    a = dumps(run_suite(cases, seed=7).to_dict())
    b = dumps(run_suite(cases, seed=7).to_dict())
    c = dumps(run_suite(cases, seed=8).to_dict())
    assert a == b and a != c


def test_generator_exhaustion(monkeypatch):
    def never(rng, cfg):
        raise verify.Degenerate("always degenerate")

    monkeypatch.setitem(verify.PROPERTIES, "E3", (never, verify.PROPERTIES["E3"][1]))
    with pytest.raises(GeneratorExhausted):
        run_case(PropertyCase("E3", 1))


def test_case_strictness():
    with pytest.raises(MalformedInput):
        PropertyCase("E99")
    with pytest.raises(MalformedInput):
        PropertyCase("E3", config={"dimz": [2]})
    with pytest.raises(MalformedInput):
        PropertyCase.from_dict({"equation_id": "E3", "trails": 5})
    with pytest.raises(MalformedInput):
        PropertyCase("E3", trials=-1)
    case = PropertyCase.from_dict({"equation_id": "E15", "trials": 3, "config": {"dims": [2, 3]}})
    assert PropertyCase.from_dict(case.to_dict()) == case


def test_default_suite_covers_every_id():
    ids = {c.equation_id for c in default_cases(10)}
    assert ids == set(verify.EQUATION_IDS)


def test_report_hides_timing_by_default():
    rep = run_suite([PropertyCase("DIRAC", 3)])
    assert "wall_time" not in rep.to_dict()["cases"][0]
    assert "wall_time" in rep.to_dict(timing=True)["cases"][0]
    assert tv_norm(DiscreteMeasure(L1Norm(2))).value == 0.0

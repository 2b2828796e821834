"""Randomized property engine.

Each ``PropertyCase`` names an identity or inequality (``E3``, ``E13`` ...),
a generator config, a trial count and a seed. ``run_suite`` draws instances,
checks them against independent oracles and returns a report with the worst
relative slack per case and a replayable counterexample on failure.

Slack of ``lhs <= rhs`` is ``(lhs - rhs) / max(rhs, 1e-12)``; of ``lhs == rhs``
it is ``|lhs - rhs| / max(|rhs|, 1e-12)``. A trial fails above ``1e-8``.
"""
from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import duality, hahn_banach, measures, operators
from .core import COMPLEX, REAL, FiniteSet
from .errors import (AtomOffSphere, DimMismatch, GeneratorExhausted, InvalidNorm,
                     MalformedInput, NormLabError, TooLarge, ZeroVector)
from .functions import Abs, Const, Coord, Identity, Prod, Sum, Table
from .hahn_banach import PartialFunctional, Subspace
from .measures import DiscreteMeasure, MERGE_TOL, DROP_TOL, exact_sum
from .norms import (EllipsoidNorm, L1Norm, LinfNorm, LpNorm, PolyFacetNorm,
                    PolyVertexNorm, random_vectors)

PASS_SLACK = 1e-8
MAX_REGENERATIONS = 100
PHASE_GRID = 64
MAX_REAL_ATOMS = 12
MAX_COMPLEX_ATOMS = 6

EQUATION_IDS = ("E3", "E4", "E5norm", "E7", "E8", "E11", "E13", "E15", "E16",
                "E17", "E18", "DIRAC")
ALL_VARIANTS = ("L1", "Linf", "Lp", "Ellipsoid", "PolyVertex", "PolyFacet")
HB_VARIANTS = ("L1", "Linf", "Lp2", "Ellipsoid", "PolyVertex", "PolyFacet")
CONFIG_KEYS = {"dims", "field", "variants", "max_atoms", "adversarial", "subspace"}


class Degenerate(Exception):
    """Raised by a generator to ask for a fresh instance."""


# ---------------------------------------------------------------------------
# cases and reports


@dataclass
class PropertyCase:
    equation_id: str
    trials: int = 100
    seed: int = 0
    config: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.equation_id not in EQUATION_IDS:
            raise MalformedInput(f"unknown equation id {self.equation_id!r}")
        unknown = set(self.config) - CONFIG_KEYS
        if unknown:
            raise MalformedInput(f"unknown generator config keys {sorted(unknown)}")
        if int(self.trials) != self.trials or self.trials < 0:
            raise MalformedInput("trials must be a nonnegative integer")
        self.trials = int(self.trials)

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise MalformedInput("a case must be a JSON object")
        unknown = set(data) - {"equation_id", "trials", "seed", "config"}
        if unknown or "equation_id" not in data:
            raise MalformedInput(f"bad case keys {sorted(data)}")
        return cls(data["equation_id"], data.get("trials", 100), data.get("seed", 0),
                   dict(data.get("config", {})))

    def to_dict(self):
        return {"equation_id": self.equation_id, "trials": self.trials, "seed": self.seed,
                "config": self.config}


@dataclass
class CaseResult:
    case: PropertyCase
    index: int
    passed: bool
    worst_slack: float
    worst_ratio: float
    violations: int
    regenerations: int
    counterexample: Optional[dict] = None
    wall_time: float = 0.0

    def to_dict(self, timing: bool = False):
        out = {"index": self.index, **self.case.to_dict(), "passed": self.passed,
               "worst_slack": self.worst_slack, "worst_ratio": self.worst_ratio,
               "violations": self.violations, "regenerations": self.regenerations,
               "counterexample": self.counterexample}
        if timing:
            out["wall_time"] = self.wall_time
        return out


@dataclass
class PropertyReport:
    seed: int
    results: list

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def to_dict(self, timing: bool = False):
        return {"seed": self.seed, "passed": self.passed,
                "cases": [r.to_dict(timing) for r in self.results]}


def slack(lhs, rhs, kind: str) -> float:
    if kind == "le":
        return float((lhs - rhs) / max(rhs, 1e-12))
    return float(abs(lhs - rhs) / max(abs(rhs), 1e-12))


# ---------------------------------------------------------------------------
# generators


def _dims(cfg):
    dims = cfg.get("dims", [2, 6])
    if isinstance(dims, int):
        return dims, dims
    lo, hi = dims
    return int(lo), int(hi)


def random_norm(rng, dim: int, field: str = REAL, variants=ALL_VARIANTS):
    """One random spec drawn from ``variants`` (polyhedral ones only over the reals)."""
    pool = [v for v in variants if field == REAL or v not in ("PolyVertex", "PolyFacet")]
    if not pool:
        raise MalformedInput("no norm variant available for this field")
    variant = pool[rng.integers(len(pool))]
    if variant == "L1":
        return L1Norm(dim, field)
    if variant == "Linf":
        return LinfNorm(dim, field)
    if variant == "Lp":
        p = float(rng.choice([1.5, 2.0, 3.0, 4.5, rng.uniform(1.05, 8.0)]))
        return LpNorm(dim, p, field)
    if variant == "Lp2":
        return LpNorm(dim, 2.0, field)
    if variant == "Ellipsoid":
        A = rng.standard_normal((dim, dim))
        if field == COMPLEX:
            A = A + 1j * rng.standard_normal((dim, dim))
        G = A @ A.conj().T + rng.uniform(0.1, 1.0) * np.eye(dim)
        return EllipsoidNorm((G + G.conj().T) / 2, field)
    count = int(rng.integers(dim + 1, 2 * dim + 1))
    rows = rng.standard_normal((count, dim)) * np.exp(rng.uniform(-0.5, 0.5, (count, 1)))
    try:
        return PolyVertexNorm(rows) if variant == "PolyVertex" else PolyFacetNorm(rows)
    except InvalidNorm as exc:
        raise Degenerate(str(exc)) from exc


def _spec(rng, cfg, variants=ALL_VARIANTS):
    lo, hi = _dims(cfg)
    dim = int(rng.integers(lo, hi + 1))
    return random_norm(rng, dim, cfg.get("field", REAL), cfg.get("variants", variants))


def sphere_points(rng, spec, n):
    pts = random_vectors(rng, n, spec.dim, spec.field)
    return pts / np.asarray(spec(pts))[:, None]


def random_measure(rng, spec, max_atoms: int = 8, adversarial: bool = False) -> DiscreteMeasure:
    """Random atoms on the sphere; ``adversarial`` adds exact and near duplicates."""
    base = max(1, max_atoms // 2) if adversarial else max_atoms
    n = int(rng.integers(1, base + 1))
    pts = sphere_points(rng, spec, n)
    w = random_vectors(rng, 1, n, spec.field)[0]
    if adversarial and max_atoms > n:
        pts, w = list(pts), list(w)
        for _ in range(int(rng.integers(1, max_atoms - n + 1))):
            i = int(rng.integers(len(pts)))
            kind = rng.integers(4)
            offset = float(rng.choice([0.0, 1e-11, 4e-10, 9e-10, 2e-9, 1e-7]))
            q = pts[i] + offset * rng.choice([-1.0, 1.0], spec.dim)
            if kind == 0:
                wt = -w[i]
            elif kind == 1:
                wt = w[i]
            elif kind == 2:
                wt = random_vectors(rng, 1, 1, spec.field)[0, 0]
            else:
                wt = w[i] * 1e-13
            pts.append(q)
            w.append(wt)
        order = rng.permutation(len(pts))
        pts, w = np.array(pts)[order], np.array(w)[order]
    try:
        return DiscreteMeasure(spec, pts, w)
    except AtomOffSphere as exc:
        raise Degenerate(str(exc)) from exc


def random_subspace(rng, dim: int, k: int, field: str = REAL) -> Subspace:
    basis = random_vectors(rng, k, dim, field) if k else np.zeros((0, dim))
    try:
        return Subspace(dim, basis)
    except DimMismatch as exc:
        raise Degenerate(str(exc)) from exc


def random_scalar_function(rng, dim: int):
    """Coordinate-built functions: affine, |affine| or a product of coordinates."""
    i, j = (int(x) for x in rng.integers(dim, size=2))
    a, b = rng.standard_normal(2)
    kind = rng.integers(4)
    if kind == 0:
        return Prod([Const(a), Coord(i)])
    if kind == 1:
        return Sum([Prod([Const(a), Coord(i)]), Prod([Const(b), Coord(j)]), Const(rng.uniform(-1, 1))])
    if kind == 2:
        return Abs(Coord(i))
    return Prod([Coord(i), Coord(j)])


# ---------------------------------------------------------------------------
# oracles


def _components(points, tol=MERGE_TOL):
    """Connected components of the 'within tol' graph, by breadth-first search."""
    n = len(points)
    adj = [[j for j in range(n) if j != i and np.max(np.abs(points[i] - points[j])) <= tol]
           for i in range(n)]
    seen, comps = [False] * n, []
    for s in range(n):
        if seen[s]:
            continue
        seen[s] = True
        queue, comp = [s], []
        while queue:
            u = queue.pop()
            comp.append(u)
            for v in adj[u]:
                if not seen[v]:
                    seen[v] = True
                    queue.append(v)
        comps.append(comp)
    return comps


def brute_force_tv(mu: DiscreteMeasure) -> float:
    """Enumerate values of ``f`` at the atoms and return ``max |mu(f)|``.

    Atoms within the merge tolerance are one point of the sphere, so ``f``
    takes one value there. Real: all sign patterns (exact). Complex: a
    64-point phase grid per atom (a lower bound within ``1 - cos(pi/64)``).
    """
    n = len(mu)
    limit = MAX_REAL_ATOMS if mu.field == REAL else MAX_COMPLEX_ATOMS
    if n > limit:
        raise TooLarge(f"brute force handles at most {limit} atoms, got {n}")
    W = [exact_sum(mu.weights[c]) for c in _components(mu.points)]
    W = np.array([x for x in W if abs(x) > DROP_TOL])
    k = len(W)
    if k == 0:
        return 0.0
    if mu.field == REAL:
        signs = 1.0 - 2.0 * ((np.arange(2 ** k)[:, None] >> np.arange(k)) & 1)
        approx = np.abs(signs @ W)
        top = approx.max()
        near = np.flatnonzero(approx >= top * (1 - 1e-9))
        return max(abs(math.fsum(s * W)) for s in signs[near])
    return _phase_grid_max(W)


def _phase_grid_max(W) -> float:
    # The first phase is fixed (|mu(f)| is rotation invariant); the last one is
    # the grid point closest to the optimum, which is what a full scan over
    # that coordinate would pick.
    m = PHASE_GRID
    grid = np.exp(2j * np.pi * np.arange(m) / m)
    k = len(W)
    if k == 1:
        return float(abs(W[0]))
    last = W[-1]
    middle = [W[i] * grid for i in range(1, k - 1)]
    chunks = [np.array([W[0]])] if not middle else [W[0] + middle[0][t:t + 1] for t in range(m)]
    best = 0.0
    for sums in chunks:
        for row in middle[1:]:
            sums = (sums[:, None] + row[None, :]).reshape(-1)
        step = np.round((np.angle(sums) - np.angle(last)) / (2 * np.pi / m)).astype(int) % m
        best = max(best, float(np.abs(sums + last * grid[step]).max()))
    return best


def dual_norm_oracle(spec, lam) -> float:
    """Closed-form conjugates and brute-force vertex maxima, independent of duality."""
    lam = np.asarray(lam)
    if isinstance(spec, L1Norm):
        return float(np.abs(lam).max())
    if isinstance(spec, LinfNorm):
        return math.fsum(np.abs(lam))
    if isinstance(spec, LpNorm):
        q = spec.conjugate_exponent
        if math.isinf(q):
            return float(np.abs(lam).max())
        a = np.abs(lam)
        top = a.max()
        return float(top * np.sum((a / top) ** q) ** (1 / q)) if top > 0 else 0.0
    if isinstance(spec, EllipsoidNorm):
        e, Q = np.linalg.eigh(spec.gram)
        a = np.conj(lam)
        return float(math.sqrt(np.sum(np.abs(Q.conj().T @ a) ** 2 / e)))
    if isinstance(spec, PolyVertexNorm):
        return max(abs(float(g @ lam)) for g in spec.generators)
    if isinstance(spec, PolyFacetNorm):
        return max(abs(float(x @ lam)) for x in facet_vertices_bruteforce(spec.functionals))
    raise MalformedInput(f"no oracle for {type(spec).__name__}")


def facet_vertices_bruteforce(F) -> list:
    """Vertices of ``{x : |F x| <= 1}`` by solving every square subsystem."""
    F = np.asarray(F, dtype=float)
    n = F.shape[1]
    out = []
    for rows in itertools.combinations(range(F.shape[0]), n):
        M = F[list(rows)]
        if abs(np.linalg.det(M)) < 1e-12:
            continue
        for signs in itertools.product((1.0, -1.0), repeat=n):
            x = np.linalg.solve(M, np.array(signs))
            if np.max(np.abs(F @ x)) <= 1 + 1e-9:
                out.append(x)
    return out


# ---------------------------------------------------------------------------
# per-equation generators and checks
#
# gen(rng, cfg) -> instance dict; check(instance, impl) -> [(name, lhs, rhs, kind)]


def _gen_e3(rng, cfg):
    spec = _spec(rng, cfg)
    v, w = random_vectors(rng, 2, spec.dim, spec.field)
    alpha = random_vectors(rng, 1, 1, spec.field)[0, 0]
    return {"norm": spec, "v": v, "w": w, "alpha": alpha}


def _check_e3(inst, impl):
    spec, v, w, a = inst["norm"], inst["v"], inst["w"], inst["alpha"]
    nv = float(spec(v))
    return [("triangle", float(spec(v + w)), nv + float(spec(w)), "le"),
            ("homogeneity", float(spec(a * v)), abs(a) * nv, "eq"),
            ("positivity", 0.0 if nv > 0 else 1.0, 0.0, "le")]


def _gen_map(rng, cfg, by_columns):
    spec = _spec(rng, cfg)
    n = int(rng.integers(1, 7))
    E = FiniteSet([f"x{i}" for i in range(n)])
    data = random_vectors(rng, n, spec.dim, spec.field)
    if by_columns:
        A = operators.MapFromFunctions(E, data)
        f = random_vectors(rng, 1, n, spec.field)[0]
        return {"norm": spec, "map": A, "f": f}
    T = operators.MapToFunctions(E, data)
    v = random_vectors(rng, 1, spec.dim, spec.field)[0]
    return {"norm": spec, "map": T, "v": v}


def _check_e4(inst, impl):
    spec, A, f = inst["norm"], inst["map"], inst["f"]
    res = impl["opnorm_l1_to_V"](A, spec, audit=0)
    Af = f @ A.columns
    return [("bound", float(spec(Af)), res.value * math.fsum(np.abs(f)), "le"),
            ("attained", float(spec(A.column(res.witness_label))), res.value, "eq")]


def _check_e7(inst, impl):
    spec, T, v = inst["norm"], inst["map"], inst["v"]
    res = impl["opnorm_V_to_linf"](T, spec, audit=0)
    Tv = T.rows @ v
    row = T.row(res.witness_label)
    return [("bound", float(np.abs(Tv).max()), res.value * float(spec(v)), "le"),
            ("attained", float(abs(row(res.witness_vector))), res.value, "eq"),
            ("witness_in_ball", float(spec(res.witness_vector)), 1.0, "le")]


def _gen_e5(rng, cfg):
    spec = _spec(rng, cfg)
    lam, v = random_vectors(rng, 2, spec.dim, spec.field)
    return {"norm": spec, "functional": lam, "v": v}


def _check_e5(inst, impl):
    spec, lam, v = inst["norm"], inst["functional"], inst["v"]
    res = impl["dual_norm"](spec, lam)
    return [("oracle", res.value, dual_norm_oracle(spec, lam), "eq"),
            ("holder", float(abs(v @ lam)), res.value * float(spec(v)), "le"),
            ("attained", float(abs(res.witness @ lam)), res.value, "eq"),
            ("witness_in_ball", float(spec(res.witness)), 1.0, "le")]


def _gen_e8(rng, cfg):
    field_ = cfg.get("field", REAL)
    variants = ("Lp2", "Ellipsoid") if field_ == COMPLEX else HB_VARIANTS
    spec = _spec(rng, cfg, variants)
    mode = cfg.get("subspace", "random")
    k = {"full": spec.dim, "zero": 0}.get(mode)
    if k is None:
        k = int(rng.integers(0, spec.dim))
    W = random_subspace(rng, spec.dim, k, spec.field)
    y = random_vectors(rng, 1, k, spec.field)[0] if k else np.zeros(0)
    L0 = hahn_banach.minimal_bound(spec, W, y)
    L = L0 * (1.0 + float(rng.choice([0.0, rng.uniform(0, 1)])))
    if L0 == 0:
        L = float(rng.uniform(0.5, 2.0))
    return {"norm": spec, "subspace": W, "values": y, "bound": L}


def _check_e8(inst, impl):
    spec = inst["norm"]
    pf = PartialFunctional(inst["subspace"], inst["values"], inst["bound"])
    res = impl["extend_with_certificate"](spec, pf)
    checks = [("restriction", res.restriction_error, 1e-9, "le"),
              ("ball", res.extended_dual_norm, res.bound, "le"),
              ("ball_violation", res.ball_violation, 1e-8, "le")]
    for s in res.steps:
        checks.append(("interval", max(0.0, s.c_min - s.c_max), 1e-9, "le"))
    return checks


def _gen_e11(rng, cfg):
    spec = _spec(rng, cfg)
    return {"norm": spec, "v": random_vectors(rng, 1, spec.dim, spec.field)[0]}


def _check_e11(inst, impl):
    spec, v = inst["norm"], inst["v"]
    lam = impl["norming_functional"](spec, v)
    r = float(spec(v))
    return [("dual_norm", impl["dual_norm"](spec, lam).value, 1.0, "eq"),
            ("norming", complex(lam(v)) / r, 1.0, "eq")]


def _gen_measure(rng, cfg, default_atoms=8, adversarial=False):
    spec = _spec(rng, cfg)
    return {"norm": spec, "measure": random_measure(
        rng, spec, int(cfg.get("max_atoms", default_atoms)),
        bool(cfg.get("adversarial", adversarial)))}


def _check_e13(inst, impl):
    mu = inst["measure"]
    tv = impl["tv_norm"](mu).value
    brute = brute_force_tv(mu)
    if mu.field == REAL:
        return [("brute_force", tv, brute, "eq")]
    return [("grid_below", brute, tv, "le"),
            ("grid_resolution", tv * math.cos(math.pi / PHASE_GRID), brute, "le")]


def _gen_e15(rng, cfg):
    inst = _gen_measure(rng, cfg)
    inst["measure"] = measures.canonicalize(inst["measure"])
    inst["phi"] = random_scalar_function(rng, inst["norm"].dim)
    return inst


def _check_e15(inst, impl):
    rep = measures.multiply_bound_check(inst["measure"], inst["phi"])
    return [("multiply", rep.lhs, rep.rhs, "le")]


def _gen_e16(rng, cfg):
    inst = _gen_measure(rng, cfg)
    spec = inst["norm"]
    if rng.random() < 0.25:
        inst["phis"] = [Abs(Coord(j)) for j in range(spec.dim)]
    else:
        inst["phis"] = [random_scalar_function(rng, spec.dim)
                        for _ in range(int(rng.integers(1, 5)))]
    return inst


def _check_e16(inst, impl):
    rep = measures.partition_bound_check(inst["measure"], inst["phis"])
    return [("partition", rep.lhs, rep.rhs, "le")]


def _gen_e17(rng, cfg):
    inst = _gen_measure(rng, cfg)
    mu, spec = inst["measure"], inst["norm"]
    if rng.random() < 0.2:
        inst["F"] = Identity(spec.dim)
    else:
        vals = random_vectors(rng, len(mu), spec.dim, spec.field)
        inst["F"] = Table(mu.points, vals)
    return inst


def _check_e17(inst, impl):
    rep = measures.vector_bound_check(inst["measure"], inst["F"])
    return [("vector", rep.lhs, rep.rhs, "le")]


def _check_e18(inst, impl):
    mu = inst["measure"]
    b = impl["barycenter"](mu)
    return [("barycenter", float(mu.spec(b)), impl["tv_norm"](mu).value, "le")]


def _gen_dirac(rng, cfg):
    spec = _spec(rng, cfg)
    return {"norm": spec, "v": sphere_points(rng, spec, 1)[0]}


def _check_dirac(inst, impl):
    spec, v = inst["norm"], inst["v"]
    d = measures.dirac(spec, v)
    b = impl["barycenter"](d)
    return [("mass", impl["tv_norm"](d).value, 1.0, "eq"),
            ("fixed", float(np.max(np.abs(b - v))), 0.0, "le")]


PROPERTIES: dict = {
    "E3": (_gen_e3, _check_e3),
    "E4": (lambda r, c: _gen_map(r, c, True), _check_e4),
    "E5norm": (_gen_e5, _check_e5),
    "E7": (lambda r, c: _gen_map(r, c, False), _check_e7),
    "E8": (_gen_e8, _check_e8),
    "E11": (_gen_e11, _check_e11),
    "E13": (lambda r, c: _gen_measure(r, c, 12, True), _check_e13),
    "E15": (_gen_e15, _check_e15),
    "E16": (_gen_e16, _check_e16),
    "E17": (_gen_e17, _check_e17),
    "E18": (_gen_measure, _check_e18),
    "DIRAC": (_gen_dirac, _check_dirac),
}

DEFAULT_IMPLEMENTATIONS: dict = {
    "tv_norm": measures.tv_norm,
    "barycenter": measures.barycenter,
    "dual_norm": duality.dual_norm,
    "norming_functional": duality.norming_functional,
    "opnorm_l1_to_V": operators.opnorm_l1_to_V,
    "opnorm_V_to_linf": operators.opnorm_V_to_linf,
    "extend_with_certificate": hahn_banach.extend_with_certificate,
}


# ---------------------------------------------------------------------------
# driver


def _trial_rng(base_seed, case_seed, trial, regen):
    return np.random.default_rng([base_seed, case_seed, trial, regen])


def generate(case: PropertyCase, trial: int, base_seed: int = 0):
    """The instance of ``trial``, plus the number of regenerations it took."""
    gen, _ = PROPERTIES[case.equation_id]
    for regen in range(MAX_REGENERATIONS + 1):
        try:
            return gen(_trial_rng(base_seed, case.seed, trial, regen), case.config), regen
        except (Degenerate, InvalidNorm, ZeroVector, AtomOffSphere) as exc:
            last = exc
    raise GeneratorExhausted(f"{case.equation_id}: no usable instance after "
                             f"{MAX_REGENERATIONS} regenerations ({last})",
                             equation_id=case.equation_id, trial=trial)


def evaluate(case: PropertyCase, instance, implementations=None):
    """Run the checks on one instance: ``(worst slack, worst ratio, checks)``."""
    impl = {**DEFAULT_IMPLEMENTATIONS, **(implementations or {})}
    _, check = PROPERTIES[case.equation_id]
    try:
        checks = check(instance, impl)
    except NormLabError as exc:
        return math.inf, math.inf, [{"name": "error", "error": exc.to_dict()}]
    rows, worst, ratio = [], -math.inf, -math.inf
    for name, lhs, rhs, kind in checks:
        s = slack(lhs, rhs, kind)
        worst = max(worst, s)
        if kind == "le" and rhs > 0:
            ratio = max(ratio, float(lhs / rhs))
        rows.append({"name": name, "lhs": lhs, "rhs": rhs, "kind": kind, "slack": s})
    return worst, ratio, rows


def _shrink(case, instance, implementations):
    """Drop atoms from a failing measure instance while it keeps failing."""
    mu = instance.get("measure")
    if mu is None or case.equation_id not in ("E13", "E18"):
        return instance
    current = instance
    changed = True
    while changed and len(current["measure"]) > 1:
        changed = False
        m = current["measure"]
        for i in range(len(m)):
            keep = [j for j in range(len(m)) if j != i]
            trial = {**current, "measure": DiscreteMeasure(m.spec, m.points[keep], m.weights[keep])}
            if evaluate(case, trial, implementations)[0] > PASS_SLACK:
                current, changed = trial, True
                break
    return current


def run_case(case: PropertyCase, index: int = 0, base_seed: int = 0,
             implementations=None) -> CaseResult:
    from .io import to_jsonable

    start = time.perf_counter()
    worst, ratio, violations, regens = -math.inf, -math.inf, 0, 0
    counterexample = None
    for t in range(case.trials):
        inst, r = generate(case, t, base_seed)
        regens += r
        s, q, rows = evaluate(case, inst, implementations)
        worst, ratio = max(worst, s), max(ratio, q)
        if s > PASS_SLACK:
            violations += 1
            if counterexample is None:
                small = _shrink(case, inst, implementations)
                counterexample = {"trial": t, "regeneration": r, "base_seed": base_seed,
                                  "instance": to_jsonable(small),
                                  "checks": to_jsonable(evaluate(case, small, implementations)[2])}
    return CaseResult(case, index, violations == 0, _finite(worst), _finite(ratio), violations,
                      regens, counterexample, time.perf_counter() - start)


def _finite(x):
    return None if math.isinf(x) else float(x)


def run_suite(cases, implementations: Optional[dict] = None, seed: int = 0) -> PropertyReport:
    """Run every case in order; results are indexed by case position."""
    cases = [c if isinstance(c, PropertyCase) else PropertyCase.from_dict(c) for c in cases]
    return PropertyReport(seed, [run_case(c, i, seed, implementations) for i, c in enumerate(cases)])


def default_cases(trials: int = 1000) -> list:
    """The full suite: every equation id at desk scale."""
    cases = []
    for i, eq in enumerate(EQUATION_IDS):
        cfg: dict = {}
        if eq in ("E13",):
            cfg = {"max_atoms": 12, "adversarial": True}
        if eq in ("E15", "E16", "E17", "E18", "DIRAC"):
            cfg = {"dims": [2, 5]}
        cases.append(PropertyCase(eq, trials, i, cfg))
    cases.append(PropertyCase("E8", max(1, trials // 10), 100, {"subspace": "full"}))
    cases.append(PropertyCase("E13", max(1, trials // 10), 101,
                              {"field": COMPLEX, "max_atoms": 5, "adversarial": True}))
    return cases


__all__ = ["PropertyCase", "CaseResult", "PropertyReport", "run_suite", "run_case",
           "default_cases", "brute_force_tv", "dual_norm_oracle", "facet_vertices_bruteforce",
           "random_norm", "random_measure", "random_subspace", "random_scalar_function",
           "sphere_points", "generate", "evaluate", "slack", "EQUATION_IDS", "PASS_SLACK"]

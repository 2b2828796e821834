"""Norms on V in exact representations, axiom checking and the unit sphere.

Each representation is a small immutable class. ``spec(v)`` evaluates the
norm and accepts batches (leading axes) so property checks can vectorize.

Polyhedral norms are real only. A vertex-form ball ``conv{+-g_i}`` has a
gauge that is a linear program; when the polar polytope is small enough to
enumerate (the usual desk-scale case) its vertices are cached and the gauge
becomes an exact max of dot products. ``gauge_lp`` keeps the LP route
available as an independent path.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .core import COMPLEX, REAL, Functional, as_vector, check_field
from .errors import InvalidNorm, MalformedInput, Unsupported, ZeroVector
from .lp import Constraint, LinearProgram, lp_solve

DEGENERACY_TOL = 1e-9
ZERO_TOL = 1e-12
MAX_ENUMERATION = 200_000


def symmetric_polytope_vertices(F, tol: float = 1e-9, max_candidates: int = MAX_ENUMERATION):
    """Vertices of ``{x : |F x| <= 1}`` for a full-rank ``m x n`` matrix ``F``.

    Every vertex is the solution of ``F_S x = s`` for some ``n`` independent
    rows ``S`` and signs ``s``; the candidates are enumerated in batches and
    filtered for feasibility. Returns ``None`` when the candidate count
    exceeds ``max_candidates``.
    """
    F = np.asarray(F, dtype=float)
    m, n = F.shape
    n_candidates = math.comb(m, n) * 2 ** (n - 1)
    if n_candidates > max_candidates:
        return None
    signs = np.array([(1.0,) + s for s in itertools.product((1.0, -1.0), repeat=n - 1)]).T
    subsets = np.array(list(itertools.combinations(range(m), n)))
    found = []
    for start in range(0, len(subsets), 4096):
        mats = F[subsets[start:start + 4096]]
        sv = np.linalg.svd(mats, compute_uv=False)
        good = sv[:, -1] > 1e-10 * np.maximum(sv[:, 0], 1e-300)
        if not good.any():
            continue
        pts = np.linalg.solve(mats[good], np.broadcast_to(signs, (good.sum(),) + signs.shape))
        pts = pts.transpose(0, 2, 1).reshape(-1, n)
        feasible = np.abs(pts @ F.T).max(axis=1) <= 1.0 + tol
        found.append(pts[feasible])
    if not found:
        return np.zeros((0, n))
    pts = np.vstack(found)
    pts = np.vstack([pts, -pts])
    return _dedupe(pts)


def _dedupe(points, tol: float = 1e-9):
    if len(points) == 0:
        return points
    keys = np.round(points / tol).astype(np.int64)
    _, idx = np.unique(keys, axis=0, return_index=True)
    return points[np.sort(idx)]


class NormSpec:
    """Base class of the norm representations."""

    variant: str = ""
    dim: int
    field: str

    def __call__(self, v):
        return self.evaluate(as_vector(v, self.dim, self.field))

    def evaluate(self, v):
        raise NotImplementedError

    @property
    def is_polyhedral(self) -> bool:
        return False

    def ball_vertices(self):
        """Points of the sphere containing every extreme point of the ball,
        or ``None`` when the ball is not a polytope."""
        return None

    def to_dict(self) -> dict:
        raise NotImplementedError

    def _key(self):
        d = self.to_dict()
        for k, val in d.items():
            if isinstance(val, np.ndarray):
                d[k] = [[(complex(x).real, complex(x).imag) for x in row] for row in val]
        return d

    def __eq__(self, other):
        return isinstance(other, NormSpec) and self._key() == other._key()

    def __hash__(self):
        return hash(repr(self._key()))

    def __repr__(self):
        return f"{type(self).__name__}(dim={self.dim}, field={self.field!r})"


def _check_dim(dim):
    if int(dim) != dim or dim < 1:
        raise InvalidNorm(f"dimension must be a positive integer, got {dim!r}")
    return int(dim)


class L1Norm(NormSpec):
    variant = "L1"

    def __init__(self, dim: int, field: str = REAL):
        self.dim = _check_dim(dim)
        self.field = check_field(field)

    def evaluate(self, v):
        return np.sum(np.abs(v), axis=-1)

    @property
    def is_polyhedral(self):
        return self.field == REAL

    def ball_vertices(self):
        if self.field != REAL:
            return None
        eye = np.eye(self.dim)
        return np.vstack([eye, -eye])

    def to_dict(self):
        return {"variant": self.variant, "dim": self.dim, "field": self.field}


class LinfNorm(NormSpec):
    variant = "Linf"

    def __init__(self, dim: int, field: str = REAL):
        self.dim = _check_dim(dim)
        self.field = check_field(field)

    def evaluate(self, v):
        return np.max(np.abs(v), axis=-1)

    @property
    def is_polyhedral(self):
        return self.field == REAL

    def ball_vertices(self):
        if self.field != REAL or self.dim > 16:
            return None
        return np.array(list(itertools.product((1.0, -1.0), repeat=self.dim)))

    def to_dict(self):
        return {"variant": self.variant, "dim": self.dim, "field": self.field}


class LpNorm(NormSpec):
    variant = "Lp"

    def __init__(self, dim: int, p: float, field: str = REAL):
        self.dim = _check_dim(dim)
        self.field = check_field(field)
        p = float(p)
        if not p >= 1.0:
            raise InvalidNorm(f"Lp needs p >= 1, got {p}")
        self.p = p

    @property
    def conjugate_exponent(self) -> float:
        if self.p == 1.0:
            return math.inf
        if math.isinf(self.p):
            return 1.0
        return self.p / (self.p - 1.0)

    def evaluate(self, v):
        return np.linalg.norm(v, ord=self.p, axis=-1)

    def to_dict(self):
        return {"variant": self.variant, "dim": self.dim, "field": self.field,
                "p": "inf" if math.isinf(self.p) else self.p}


class EllipsoidNorm(NormSpec):
    """``||v|| = sqrt(v^H G v)`` for a positive-definite Gram matrix ``G``."""

    variant = "Ellipsoid"

    def __init__(self, gram, field: str | None = None):
        gram = np.array(gram)
        if gram.ndim != 2 or gram.shape[0] != gram.shape[1] or gram.shape[0] < 1:
            raise InvalidNorm("gram must be a non-empty square matrix")
        if field is None:
            field = COMPLEX if np.iscomplexobj(gram) else REAL
        self.field = check_field(field)
        if self.field == REAL and np.iscomplexobj(gram):
            if np.abs(gram.imag).max() > 0:
                raise InvalidNorm("complex gram for a real ellipsoid norm")
            gram = gram.real
        gram = gram.astype(complex if self.field == COMPLEX else float)
        scale = max(1.0, float(np.abs(gram).max()))
        if np.abs(gram - gram.conj().T).max() > DEGENERACY_TOL * scale:
            raise InvalidNorm("gram must be symmetric (Hermitian)")
        gram = (gram + gram.conj().T) / 2
        try:
            chol = np.linalg.cholesky(gram)
        except np.linalg.LinAlgError:
            raise InvalidNorm("gram is not positive definite") from None
        pivots = np.abs(np.diag(chol)) ** 2
        if pivots.min() <= DEGENERACY_TOL * scale:
            raise InvalidNorm("gram is numerically singular")
        gram.setflags(write=False)
        self.gram = gram
        self.dim = gram.shape[0]
        self._chol = chol

    @classmethod
    def identity(cls, dim: int, field: str = REAL):
        return cls(np.eye(dim, dtype=complex if field == COMPLEX else float), field)

    def evaluate(self, v):
        # v^H G v = |L^H v|^2 with G = L L^H
        return np.linalg.norm(v @ self._chol.conj(), axis=-1)

    def to_dict(self):
        return {"variant": self.variant, "dim": self.dim, "field": self.field,
                "gram": self.gram}


class PolyVertexNorm(NormSpec):
    """Gauge of ``conv{+-g_i}``; one generator per antipodal pair."""

    variant = "PolyVertex"

    def __init__(self, generators, field: str = REAL):
        if field != REAL or np.iscomplexobj(generators):
            raise Unsupported("polyhedral norms are supported over the reals only")
        gens = np.array(generators, dtype=float)
        if gens.ndim != 2 or gens.shape[0] == 0:
            raise InvalidNorm("generators must be a non-empty list of vectors")
        self.dim = gens.shape[1]
        self.field = REAL
        if np.linalg.matrix_rank(gens, tol=DEGENERACY_TOL * max(1.0, np.abs(gens).max())) < self.dim:
            raise InvalidNorm("generators do not span V; the gauge would be infinite")
        gens.setflags(write=False)
        self.generators = gens

    @property
    def is_polyhedral(self):
        return True

    @cached_property
    def polar_vertices(self):
        """Vertices of ``{l : |l . g_i| <= 1}``, or ``None`` if too many."""
        verts = symmetric_polytope_vertices(self.generators)
        if verts is not None:
            verts.setflags(write=False)
        return verts

    def evaluate(self, v):
        P = self.polar_vertices
        if P is not None:
            return np.max(v @ P.T, axis=-1)
        if v.ndim == 1:
            return self.gauge_lp(v)
        flat = v.reshape(-1, self.dim)
        return np.array([self.gauge_lp(x) for x in flat]).reshape(v.shape[:-1])

    def gauge_lp(self, v) -> float:
        """``min sum(t + s)`` subject to ``v = sum (t_i - s_i) g_i``, ``t, s >= 0``."""
        v = as_vector(v, self.dim, REAL)
        G = self.generators.T
        A = np.hstack([G, -G])
        lp = LinearProgram(-np.ones(A.shape[1]),
                           [Constraint(row, "=", b) for row, b in zip(A, v)])
        sol = lp_solve(lp)
        if not sol.optimal:
            raise InvalidNorm(f"gauge LP ended with status {sol.status}")
        return -sol.objective_value

    def ball_vertices(self):
        gens = self.generators
        norms = self.evaluate(gens)
        on_sphere = gens[norms >= 1.0 - DEGENERACY_TOL]
        return np.vstack([on_sphere, -on_sphere])

    def to_dict(self):
        return {"variant": self.variant, "dim": self.dim, "field": self.field,
                "generators": self.generators}


class PolyFacetNorm(NormSpec):
    """``||v|| = max_i |l_i(v)|``; the ball is ``{v : |l_i(v)| <= 1}``."""

    variant = "PolyFacet"

    def __init__(self, functionals, field: str = REAL):
        if field != REAL or np.iscomplexobj(functionals):
            raise Unsupported("polyhedral norms are supported over the reals only")
        F = np.array([f.coeffs if isinstance(f, Functional) else f for f in functionals],
                     dtype=float)
        if F.ndim != 2 or F.shape[0] == 0:
            raise InvalidNorm("functionals must be a non-empty list of coefficient vectors")
        self.dim = F.shape[1]
        self.field = REAL
        F.setflags(write=False)
        self.functionals = F
        self._check_bounded()

    def _check_bounded(self):
        # the ball is bounded iff no coordinate direction is unbounded over it
        scale = max(1.0, float(np.abs(self.functionals).max()))
        if np.linalg.matrix_rank(self.functionals, tol=DEGENERACY_TOL * scale) < self.dim:
            raise InvalidNorm("functionals do not span the dual; the ball is unbounded")
        bounds = [(None, None)] * self.dim
        rows = [Constraint(f, "<=", 1.0) for f in self.functionals]
        rows += [Constraint(-f, "<=", 1.0) for f in self.functionals]
        for k in range(self.dim):
            c = np.zeros(self.dim)
            c[k] = 1.0
            if not lp_solve(LinearProgram(c, rows, bounds)).optimal:
                raise InvalidNorm("facet ball is unbounded")

    @property
    def is_polyhedral(self):
        return True

    @cached_property
    def vertices(self):
        verts = symmetric_polytope_vertices(self.functionals)
        if verts is not None:
            verts.setflags(write=False)
        return verts

    def evaluate(self, v):
        return np.max(np.abs(v @ self.functionals.T), axis=-1)

    def ball_vertices(self):
        return self.vertices

    def to_dict(self):
        return {"variant": self.variant, "dim": self.dim, "field": self.field,
                "functionals": self.functionals}


def linf_as_facets(dim: int) -> PolyFacetNorm:
    return PolyFacetNorm(np.eye(dim))


def l1_as_facets(dim: int) -> PolyFacetNorm:
    """The l1 ball written as facets: all sign-pattern functionals (up to sign)."""
    signs = [(1.0,) + s for s in itertools.product((1.0, -1.0), repeat=dim - 1)]
    return PolyFacetNorm(np.array(signs))


def eval_norm(spec: NormSpec, v) -> float:
    return float(spec(v))


def normalize_to_sphere(spec: NormSpec, v) -> np.ndarray:
    v = as_vector(v, spec.dim, spec.field)
    r = float(spec(v))
    if r <= ZERO_TOL:
        raise ZeroVector("cannot normalize a (near-)zero vector")
    return v / r


# ---------------------------------------------------------------------------
# axiom checking


@dataclass
class AxiomReport:
    trials: int
    violations: dict = field(default_factory=dict)
    worst: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not any(self.violations.values())

    def to_dict(self):
        return {"trials": self.trials, "violations": dict(self.violations),
                "worst": dict(self.worst), "ok": self.ok}


def random_vectors(rng, n: int, dim: int, field: str = REAL):
    x = rng.standard_normal((n, dim))
    if field == COMPLEX:
        x = x + 1j * rng.standard_normal((n, dim))
    # heavy-ish tails exercise scale invariance
    return x * np.exp(rng.uniform(-2, 2, size=(n, 1)))


def check_norm_axioms(spec: NormSpec, trials: int = 1000, seed: int = 0,
                      tol: float = 1e-9) -> AxiomReport:
    """Fuzz positivity, absolute homogeneity and the triangle inequality."""
    if trials < 1:
        raise MalformedInput("trials must be at least 1")
    rng = np.random.default_rng(seed)
    v = random_vectors(rng, trials, spec.dim, spec.field)
    w = random_vectors(rng, trials, spec.dim, spec.field)
    alpha = rng.standard_normal(trials) * np.exp(rng.uniform(-2, 2, trials))
    if spec.field == COMPLEX:
        alpha = alpha * np.exp(1j * rng.uniform(0, 2 * np.pi, trials))

    nv, nw, nvw = spec(v), spec(w), spec(v + w)
    nav = spec(alpha[:, None] * v)
    tri = (nvw - nv - nw) / np.maximum(nv + nw, 1e-12)
    hom_rhs = np.abs(alpha) * nv
    hom = np.abs(nav - hom_rhs) / np.maximum(hom_rhs, 1e-12)
    zero = float(spec(np.zeros(spec.dim)))
    pos = np.maximum(0.0, ZERO_TOL - nv)  # nonzero sample vectors must have positive norm

    report = AxiomReport(trials)
    report.violations = {
        "triangle": int(np.sum(tri > tol)),
        "homogeneity": int(np.sum(hom > tol)),
        "positivity": int(np.sum(pos > 0)) + int(zero != 0.0),
    }
    report.worst = {
        "triangle": float(tri.max()),
        "homogeneity": float(hom.max()),
        "norm_of_zero": zero,
        "min_norm": float(nv.min()),
    }
    return report

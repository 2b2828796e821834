"""Finitely supported measures on the unit sphere of a norm.

A measure is a list of weighted atoms on the sphere. Canonical form merges
atoms closer than ``MERGE_TOL`` (max-coordinate distance), drops weights of
modulus at most ``DROP_TOL`` and sorts atoms lexicographically. The total
variation norm is the sum of canonical weight moduli; without the merge two
coincident atoms of opposite weight would count twice.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import COMPLEX, REAL, as_vector
from .errors import (AtomOffSphere, DimMismatch, MalformedInput, NumericalFailure,
                     SpecMismatch, Unsupported)
from .functions import Identity, SphereFunction
from .norms import NormSpec, random_vectors
from .reports import CheckReport

MERGE_TOL = 1e-9
DROP_TOL = 1e-12
SPHERE_TOL = 1e-6
DIRAC_TOL = 1e-9
SAMPLE_SIZE = 4096


def exact_sum(values) -> complex | float:
    """Correctly rounded sum (real or complex)."""
    values = np.asarray(values)
    if np.iscomplexobj(values):
        return complex(math.fsum(values.real), math.fsum(values.imag))
    return math.fsum(values)


class DiscreteMeasure:
    """``sum_i w_i delta_{v_i}`` with every ``v_i`` on the sphere of ``spec``."""

    __slots__ = ("spec", "points", "weights", "canonical")

    def __init__(self, spec: NormSpec, points=(), weights=(), canonical: bool = False):
        points = np.asarray(points)
        if points.size == 0:
            points = np.zeros((0, spec.dim))
        points = as_vector(np.atleast_2d(points), spec.dim, spec.field)
        weights = np.asarray(weights).reshape(-1)
        if weights.size == 0:
            weights = np.zeros(0)
        if spec.field == REAL:
            if np.iscomplexobj(weights):
                raise MalformedInput("complex weights on a real sphere")
            weights = weights.astype(float)
        else:
            weights = weights.astype(complex)
        if weights.shape[0] != points.shape[0]:
            raise DimMismatch("one weight per atom")
        if len(points):
            norms = np.asarray(spec(points), dtype=float)
            off = np.abs(norms - 1.0) > SPHERE_TOL
            if off.any():
                i = int(np.flatnonzero(off)[0])
                raise AtomOffSphere(f"atom {i} has norm {norms[i]}, not 1", index=i)
        points.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "spec", spec)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "canonical", canonical)

    def __setattr__(self, name, value):
        raise AttributeError("DiscreteMeasure is immutable")

    @classmethod
    def from_atoms(cls, spec: NormSpec, atoms: Sequence):
        """Build from ``[(point, weight), ...]``."""
        if not atoms:
            return cls(spec)
        pts, wts = zip(*atoms)
        return cls(spec, np.array(pts), np.array(wts))

    @property
    def field(self) -> str:
        return self.spec.field

    def __len__(self):
        return len(self.weights)

    @property
    def atoms(self):
        return list(zip(self.points, self.weights))

    def _check_same(self, other):
        if self.spec != other.spec:
            raise SpecMismatch("measures live on spheres of different norms")

    def __add__(self, other: "DiscreteMeasure") -> "DiscreteMeasure":
        self._check_same(other)
        merged = DiscreteMeasure(self.spec, np.vstack([self.points, other.points]),
                                 np.concatenate([self.weights, other.weights]))
        return canonicalize(merged)

    def __mul__(self, scalar) -> "DiscreteMeasure":
        return canonicalize(DiscreteMeasure(self.spec, self.points, self.weights * scalar))

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other):
        if not isinstance(other, DiscreteMeasure) or self.spec != other.spec:
            return False
        a, b = canonicalize(self), canonicalize(other)
        return a.points.shape == b.points.shape and np.array_equal(a.points, b.points) \
            and np.array_equal(a.weights, b.weights)

    def __repr__(self):
        return f"DiscreteMeasure({len(self)} atoms, dim={self.spec.dim}, field={self.field!r})"


def _lex_key(p):
    if np.iscomplexobj(p):
        return tuple(x for z in p for x in (z.real, z.imag))
    return tuple(p.tolist())


def canonicalize(mu: DiscreteMeasure) -> DiscreteMeasure:
    """Merge coincident atoms, drop zero weights, sort atoms lexicographically."""
    if mu.canonical:
        return mu
    m = len(mu)
    pts = mu.points
    # union-find over pairs within the merge tolerance
    parent = list(range(m))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    if m > 1:
        close = np.abs(pts[:, None, :] - pts[None, :, :]).max(axis=2) <= MERGE_TOL
        for i, j in zip(*np.nonzero(np.triu(close, 1))):
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)
    groups: dict = {}
    for i in range(m):
        groups.setdefault(find(i), []).append(i)

    new_pts, new_wts = [], []
    for members in groups.values():
        rep = min(members, key=lambda i: _lex_key(pts[i]))
        w = exact_sum(mu.weights[members])
        if abs(w) > DROP_TOL:
            new_pts.append(pts[rep])
            new_wts.append(w)
    order = sorted(range(len(new_pts)), key=lambda k: _lex_key(new_pts[k]))
    points = np.array([new_pts[k] for k in order]) if order else np.zeros((0, mu.spec.dim))
    weights = np.array([new_wts[k] for k in order]) if order else np.zeros(0)
    return DiscreteMeasure(mu.spec, points, weights, canonical=True)


def integrate_scalar(mu: DiscreteMeasure, f: SphereFunction):
    """``mu(f) = sum_i w_i f(v_i)``."""
    if not f.is_scalar:
        raise MalformedInput("integrate_scalar needs a scalar function")
    mu = canonicalize(mu)
    if len(mu) == 0:
        return 0.0
    vals = np.asarray(f.evaluate(mu.points))
    return exact_sum(mu.weights * vals)


@dataclass(frozen=True)
class MeasureNormResult:
    value: float
    k_is_minimal: bool = True

    def to_dict(self):
        return {"value": self.value, "k_is_minimal": self.k_is_minimal}


def tv_norm(mu: DiscreteMeasure) -> MeasureNormResult:
    """Total variation norm: the least ``k`` with ``|mu(f)| <= k max|f|``."""
    mu = canonicalize(mu)
    return MeasureNormResult(math.fsum(np.abs(mu.weights)), True)


def is_nonnegative(mu: DiscreteMeasure) -> bool:
    if mu.field != REAL:
        raise Unsupported("nonnegativity is defined for real measures only")
    return bool(np.all(canonicalize(mu).weights > 0))


def multiply(mu: DiscreteMeasure, phi: SphereFunction) -> DiscreteMeasure:
    """The measure ``f -> mu(phi f)``: weights ``w_i phi(v_i)`` on the same atoms."""
    if not phi.is_scalar:
        raise MalformedInput("multiply needs a scalar function")
    # act on the canonical atoms so mu_phi never sees a split atom
    mu = canonicalize(mu)
    if len(mu) == 0:
        return mu
    vals = np.asarray(phi.evaluate(mu.points))
    spec = mu.spec
    weights = mu.weights * vals
    if spec.field == REAL and np.iscomplexobj(weights):
        raise MalformedInput("complex function values on a real measure")
    return canonicalize(DiscreteMeasure(spec, mu.points, weights))


@dataclass(frozen=True)
class SupResult:
    value: float
    exact: bool


def sphere_sup(spec: NormSpec, phis: Sequence[SphereFunction],
               extra_points=None, seed: int = 0) -> SupResult:
    """``max over the sphere of sum_j |phi_j(v)|``.

    Exact on polyhedral spheres when every ``|phi_j|`` is convex (the max of
    a convex function over a polytope sits at a vertex). Otherwise a dense
    random sample, plus ``extra_points``, gives an estimate from below.
    """
    phis = list(phis)
    if not phis:
        return SupResult(0.0, True)
    if all(p.is_constant() for p in phis):
        pt = np.zeros((1, spec.dim))
        return SupResult(float(sum(abs(p.evaluate(pt)[0]) for p in phis)), True)
    verts = spec.ball_vertices() if spec.is_polyhedral else None
    if verts is not None and all(p.abs_is_convex() for p in phis):
        total = sum(np.abs(p.evaluate(verts)) for p in phis)
        return SupResult(float(np.max(total)), True)
    rng = np.random.default_rng(seed)
    sample = random_vectors(rng, SAMPLE_SIZE, spec.dim, spec.field)
    sample = sample / np.asarray(spec(sample))[:, None]
    if verts is not None:
        sample = np.vstack([sample, verts])
    if extra_points is not None and len(extra_points):
        sample = np.vstack([sample, extra_points])
    total = sum(np.abs(p.evaluate(sample)) for p in phis)
    return SupResult(float(np.max(total)), False)


def _bound_report(lhs, sup: SupResult, mass, kind, tol=1e-9):
    rhs = sup.value * mass
    holds = lhs <= rhs * (1 + tol) + 1e-15
    return CheckReport(lhs, rhs, holds, sup.exact, {"sup": sup.value, "sup_kind": kind})


def multiply_bound_check(mu: DiscreteMeasure, phi: SphereFunction) -> CheckReport:
    """``||mu_phi|| <= max|phi| ||mu||`` with the max over the sphere."""
    lhs = tv_norm(multiply(mu, phi)).value
    sup = sphere_sup(mu.spec, [phi], extra_points=mu.points)
    return _bound_report(lhs, sup, tv_norm(mu).value, "exact" if sup.exact else "estimate")


def partition_bound_check(mu: DiscreteMeasure, phis: Sequence[SphereFunction]) -> CheckReport:
    """``sum_j ||mu_{phi_j}|| <= max sum_j |phi_j| ||mu||``."""
    lhs = math.fsum(tv_norm(multiply(mu, p)).value for p in phis)
    sup = sphere_sup(mu.spec, phis, extra_points=mu.points)
    return _bound_report(lhs, sup, tv_norm(mu).value, "exact" if sup.exact else "estimate")


def integrate_vector(mu: DiscreteMeasure, F: SphereFunction,
                     codomain_dim: Optional[int] = None) -> np.ndarray:
    """``mu(F) = sum_i w_i F(v_i)`` for a vector-valued ``F``."""
    if F.is_scalar:
        raise MalformedInput("integrate_vector needs a vector-valued function")
    expected = mu.spec.dim if codomain_dim is None else codomain_dim
    if F.arity != expected:
        raise DimMismatch(f"function takes values in dimension {F.arity}, expected {expected}")
    mu = canonicalize(mu)
    if len(mu) == 0:
        return np.zeros(F.arity, dtype=complex if mu.field == COMPLEX else float)
    vals = np.asarray(F.evaluate(mu.points))
    return np.array([exact_sum(mu.weights * vals[:, j]) for j in range(F.arity)])


def vector_bound_check(mu: DiscreteMeasure, F: SphereFunction) -> CheckReport:
    """``||mu(F)|| <= max ||F(v)|| ||mu||``, the max taken over the atoms.

    The measure only sees its atoms, so the max over atoms is a valid (and
    the sharpest) substitute for the sup over the sphere.
    """
    spec = mu.spec
    mu = canonicalize(mu)
    vec = integrate_vector(mu, F)
    lhs = float(spec(vec))
    peak = float(np.max(spec(F.evaluate(mu.points)))) if len(mu) else 0.0
    return _bound_report(lhs, SupResult(peak, True), tv_norm(mu).value, "atoms")


def barycenter(mu: DiscreteMeasure) -> np.ndarray:
    """``Phi(mu)``: the integral of the identity map ``v -> v``."""
    mu = canonicalize(mu)
    result = integrate_vector(mu, Identity(mu.spec.dim))
    mass = tv_norm(mu).value
    if float(mu.spec(result)) > mass * (1 + 1e-9) + 1e-15:
        raise NumericalFailure("barycenter exceeds the total variation norm")
    return result


def dirac(spec: NormSpec, v) -> DiscreteMeasure:
    """The point mass at ``v`` (which must already lie on the sphere)."""
    v = as_vector(v, spec.dim, spec.field)
    r = float(spec(v))
    if abs(r - 1.0) > DIRAC_TOL:
        raise AtomOffSphere(f"point has norm {r}; normalize it first")
    return DiscreteMeasure(spec, v[None, :], np.ones(1), canonical=True)


def weakstar_gap(mu: DiscreteMeasure, nu: DiscreteMeasure,
                 tests: Sequence[SphereFunction]) -> float:
    """``max_f |mu(f) - nu(f)|`` over a finite test family (0 when empty)."""
    mu._check_same(nu)
    gap = 0.0
    for f in tests:
        gap = max(gap, float(abs(integrate_scalar(mu, f) - integrate_scalar(nu, f))))
    return gap


@dataclass(frozen=True)
class SampleSup:
    value: float
    exact: bool
    empty: bool = False

    def to_dict(self):
        return {"value": self.value, "exact": self.exact, "empty_sample": self.empty}


def sup_norm_on_samples(f: SphereFunction, sample, spec: NormSpec) -> SampleSup:
    """``max |f|`` over sample points of the sphere.

    A lower bound for the sup over the sphere, flagged exact when ``f`` is
    constant or the sample contains every vertex of a polyhedral ball and
    ``|f|`` is convex.
    """
    sample = np.asarray(sample)
    if sample.size == 0:
        return SampleSup(0.0, False, True)
    sample = as_vector(np.atleast_2d(sample), spec.dim, spec.field)
    norms = np.asarray(spec(sample), dtype=float)
    if np.any(np.abs(norms - 1.0) > SPHERE_TOL):
        raise AtomOffSphere("sample point off the unit sphere")
    value = float(np.max(np.abs(f.evaluate(sample))))
    exact = f.is_constant()
    if not exact and spec.is_polyhedral and f.abs_is_convex():
        verts = spec.ball_vertices()
        if verts is not None:
            dist = np.abs(verts[:, None, :] - sample[None, :, :]).max(axis=2)
            exact = bool(np.all(dist.min(axis=1) <= MERGE_TOL))
    return SampleSup(value, exact)


__all__ = [
    "DiscreteMeasure", "MeasureNormResult", "SupResult", "SampleSup",
    "canonicalize", "integrate_scalar", "tv_norm", "is_nonnegative", "multiply",
    "multiply_bound_check", "partition_bound_check", "integrate_vector",
    "vector_bound_check", "barycenter", "dirac", "weakstar_gap",
    "sup_norm_on_samples", "sphere_sup", "exact_sum",
]

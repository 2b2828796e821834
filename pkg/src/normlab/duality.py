"""Dual norms, norming functionals, the embedding v -> phi_v and polarity."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import Functional, as_functional, as_vector, first_argmax, unit_phase
from .errors import InvalidSample, NumericalFailure, Unsupported, ZeroVector
from .lp import Constraint, LinearProgram, lp_solve
from .norms import (ZERO_TOL, EllipsoidNorm, L1Norm, LinfNorm, LpNorm, NormSpec,
                    PolyFacetNorm, PolyVertexNorm)
from .optimize import maximize_over_ball_ex
from .reports import CheckReport


@dataclass(frozen=True)
class DualNormResult:
    value: float
    witness: np.ndarray
    method: str

    def to_dict(self):
        return {"value": self.value, "witness": self.witness, "method": self.method}


def dual_norm(spec: NormSpec, lam) -> DualNormResult:
    """Exact ``sup{|l(v)| : ||v|| <= 1}`` together with a maximizing witness."""
    value, witness, method = maximize_over_ball_ex(spec, lam)
    return DualNormResult(value, witness, method)


def norming_functional(spec: NormSpec, v) -> Functional:
    """A functional of dual norm 1 with ``l(v) = ||v||`` (real, no modulus).

    Ties between several supporting functionals go to the first index in
    canonical order.
    """
    v = as_vector(v, spec.dim, spec.field)
    r = float(spec(v))
    if r <= ZERO_TOL:
        raise ZeroVector("the zero vector has no norming functional")

    if isinstance(spec, LpNorm):
        if spec.p == 1.0:
            spec_kind = "l1"
        elif math.isinf(spec.p):
            spec_kind = "linf"
        else:
            top = np.abs(v).max()
            a = np.abs(v) / top
            c = unit_phase(v) * a ** (spec.p - 1.0)
            c = c / np.linalg.norm(a, ord=spec.p) ** (spec.p - 1.0)
            return Functional(c)
    elif isinstance(spec, L1Norm):
        spec_kind = "l1"
    elif isinstance(spec, LinfNorm):
        spec_kind = "linf"
    else:
        spec_kind = None

    if spec_kind == "l1":
        c = np.where(np.abs(v) > 0, unit_phase(v), 0.0).astype(v.dtype)
        return Functional(c)
    if spec_kind == "linf":
        k = first_argmax(np.abs(v))
        c = np.zeros_like(v)
        c[k] = unit_phase(v[k])
        return Functional(c)
    if isinstance(spec, EllipsoidNorm):
        return Functional(spec.gram.T @ np.conj(v) / r)
    if isinstance(spec, PolyFacetNorm):
        vals = spec.functionals @ v
        k = first_argmax(np.abs(vals))
        return Functional(np.sign(vals[k]) * spec.functionals[k])
    if isinstance(spec, PolyVertexNorm):
        P = spec.polar_vertices
        if P is not None:
            return Functional(P[first_argmax(P @ v)].copy())
        return Functional(norming_functional_lp(spec, v))
    raise Unsupported(f"no norming functional for {type(spec).__name__}")


def norming_functional_lp(spec: PolyVertexNorm, v) -> np.ndarray:
    """Solve the dual of the gauge LP: ``max l.v`` s.t. ``|l.g_i| <= 1``."""
    G = spec.generators
    rows = [Constraint(g, "<=", 1.0) for g in G] + [Constraint(-g, "<=", 1.0) for g in G]
    sol = lp_solve(LinearProgram(np.asarray(v, dtype=float), rows, [(None, None)] * spec.dim))
    if not sol.optimal:
        raise NumericalFailure(f"dual gauge LP ended with status {sol.status}")
    return sol.x


def phi_embedding_check(spec: NormSpec, v, dual_sphere_sample: Sequence,
                        tol: float = 1e-9) -> CheckReport:
    """Compare ``max |phi_v(l)|`` over a sample of the dual sphere with ``||v||``."""
    v = as_vector(v, spec.dim, spec.field)
    r = float(spec(v))
    best = 0.0
    for i, lam in enumerate(dual_sphere_sample):
        lam = as_functional(lam)
        d = dual_norm(spec, lam).value
        if abs(d - 1.0) > 1e-6:
            raise InvalidSample(f"sample point {i} has dual norm {d}, not 1", index=i)
        best = max(best, float(abs(lam(v))))
    holds = best <= r + tol * max(1.0, r)
    attained = abs(best - r) <= tol * max(1.0, r)
    return CheckReport(lhs=best, rhs=r, holds=holds, exact=True,
                       detail={"attained": attained, "gap": r - best,
                               "sample_size": len(dual_sphere_sample)})


def polar_dual_spec(spec: NormSpec) -> NormSpec:
    """A norm on the coefficient space of functionals equal to the dual norm."""
    if isinstance(spec, L1Norm):
        return LinfNorm(spec.dim, spec.field)
    if isinstance(spec, LinfNorm):
        return L1Norm(spec.dim, spec.field)
    if isinstance(spec, LpNorm):
        return LpNorm(spec.dim, spec.conjugate_exponent, spec.field)
    if isinstance(spec, EllipsoidNorm):
        inv = np.linalg.inv(spec.gram)
        # the pairing is bilinear, so the dual gram is conj(G^-1)
        inv = np.conj((inv + inv.conj().T) / 2)
        return EllipsoidNorm(inv, spec.field)
    if isinstance(spec, PolyVertexNorm):
        return PolyFacetNorm(spec.generators)
    if isinstance(spec, PolyFacetNorm):
        return PolyVertexNorm(spec.functionals)
    raise Unsupported(f"no polar for {type(spec).__name__}")

"""Ball maximization: ``sup |l(v)|`` over the unit ball of a norm.

Closed forms for l1, l-infinity, lp and ellipsoids. Polyhedral balls use
vertex enumeration when the vertex set is available, otherwise an LP
solved by :func:`normlab.lp.lp_solve`.
"""
from __future__ import annotations

import math

import numpy as np

from .core import COMPLEX, as_functional, first_argmax, unit_phase
from .errors import DimMismatch, NumericalFailure, Unsupported
from .lp import Constraint, LinearProgram, lp_solve
from .norms import (EllipsoidNorm, L1Norm, LinfNorm, LpNorm, NormSpec,
                    PolyFacetNorm, PolyVertexNorm)

CLOSED_FORM = "ClosedForm"
VERTEX_ENUM = "VertexEnum"
LP_METHOD = "LP"


def _basis_witness(dim, field):
    w = np.zeros(dim, dtype=complex if field == COMPLEX else float)
    w[0] = 1.0
    return w


def _max_l1(c, field):
    k = first_argmax(np.abs(c))
    w = np.zeros_like(c)
    w[k] = unit_phase(c[k])
    return float(abs(c[k])), w


def _max_linf(c, field):
    return float(np.sum(np.abs(c))), unit_phase(c).astype(c.dtype)


def _max_lp(spec: LpNorm, c):
    if spec.p == 1.0:
        return _max_l1(c, spec.field)
    if math.isinf(spec.p):
        return _max_linf(c, spec.field)
    q = spec.conjugate_exponent
    top = np.abs(c).max()
    if top == 0:
        return 0.0, _basis_witness(spec.dim, spec.field)
    a = np.abs(c) / top
    value = top * np.linalg.norm(a, ord=q)
    w = unit_phase(c) * a ** (q - 1.0)
    return float(value), w / np.linalg.norm(w, ord=spec.p)


def _max_ellipsoid(spec: EllipsoidNorm, c):
    a = np.conj(c)
    x = np.linalg.solve(spec.gram, a)
    value = math.sqrt(max(float(np.real(np.vdot(a, x))), 0.0))
    if value == 0.0:
        e = _basis_witness(spec.dim, spec.field)
        return 0.0, e / float(spec(e))
    return value, x / value


def _max_points(points, c):
    vals = points @ c
    k = first_argmax(np.abs(vals))
    return float(abs(vals[k])), points[k] * np.sign(vals[k] or 1.0)


def facet_ball_lp(spec: PolyFacetNorm, c) -> LinearProgram:
    F = spec.functionals
    rows = [Constraint(f, "<=", 1.0) for f in F] + [Constraint(-f, "<=", 1.0) for f in F]
    return LinearProgram(np.asarray(c, dtype=float), rows, [(None, None)] * spec.dim)


def maximize_over_ball_ex(spec: NormSpec, objective, prefer_lp: bool = False):
    """Like :func:`maximize_over_ball` but also returns the method used."""
    lam = as_functional(objective)
    if lam.dim != spec.dim:
        raise DimMismatch(f"functional has dimension {lam.dim}, norm has {spec.dim}")
    if lam.field == COMPLEX and spec.field != COMPLEX:
        c = lam.coeffs
        if np.abs(c.imag).max() > 0:
            raise Unsupported("complex functional on a real space")
        c = c.real
    else:
        c = lam.coeffs.astype(complex if spec.field == COMPLEX else float)

    if isinstance(spec, L1Norm):
        return (*_max_l1(c, spec.field), CLOSED_FORM)
    if isinstance(spec, LinfNorm):
        return (*_max_linf(c, spec.field), CLOSED_FORM)
    if isinstance(spec, LpNorm):
        return (*_max_lp(spec, c), CLOSED_FORM)
    if isinstance(spec, EllipsoidNorm):
        return (*_max_ellipsoid(spec, c), CLOSED_FORM)
    if isinstance(spec, PolyVertexNorm):
        return (*_max_points(spec.generators, c), VERTEX_ENUM)
    if isinstance(spec, PolyFacetNorm):
        verts = None if prefer_lp else spec.vertices
        if verts is not None and len(verts):
            return (*_max_points(verts, c), VERTEX_ENUM)
        sol = lp_solve(facet_ball_lp(spec, c))
        if not sol.optimal:
            raise NumericalFailure(f"ball LP ended with status {sol.status}")
        return abs(sol.objective_value), sol.x, LP_METHOD
    raise Unsupported(f"no ball maximization for {type(spec).__name__}")


def maximize_over_ball(spec: NormSpec, objective):
    """Return ``(value, witness)`` with ``value = sup |l(v)|`` over ``||v|| <= 1``."""
    value, witness, _ = maximize_over_ball_ex(spec, objective)
    return value, witness

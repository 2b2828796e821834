"""Norm-preserving extension of functionals from a subspace W to all of V.

A functional ``l`` on ``W`` with ``|l(w)| <= L ||w||`` is extended one
direction ``z`` at a time. The admissible values ``c = l(z)`` form the
interval

    sup_w (-L ||w + z|| - l(w))  <=  c  <=  inf_w (L ||w + z|| - l(w))

whose endpoints are convex programs over ``w in W``. For polyhedral norms
(including l1 and l-infinity) they are LPs in epigraph form; for
ellipsoids they have a closed form. The midpoint is chosen at every step.

Complex functionals are handled through their real part on V viewed as a
real space of twice the dimension, then ``L(v) = Re L(v) - i Re L(iv)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .core import COMPLEX, REAL, FiniteSet, FnOnE, Functional, as_vector
from .duality import dual_norm
from .errors import DimMismatch, InvalidBound, NotNewDirection, NumericalFailure, Unsupported
from .lp import Constraint, LinearProgram, lp_solve
from .norms import (EllipsoidNorm, L1Norm, LinfNorm, LpNorm, NormSpec,
                    PolyFacetNorm, PolyVertexNorm)
from .operators import MapToFunctions

INDEPENDENCE_TOL = 1e-9
BOUND_RTOL = 1e-9
CERTIFICATE_RTOL = 1e-8


class Subspace:
    """The span of linearly independent basis vectors (rows of ``basis``)."""

    def __init__(self, ambient_dim: int, basis=()):
        basis = np.asarray(basis)
        if basis.size == 0:
            basis = np.zeros((0, ambient_dim), dtype=basis.dtype if basis.dtype != object else float)
        basis = as_vector(np.atleast_2d(basis), ambient_dim)
        if _smallest_singular(basis) <= INDEPENDENCE_TOL:
            raise DimMismatch("basis vectors are not linearly independent")
        basis.setflags(write=False)
        self.ambient_dim = int(ambient_dim)
        self.basis = basis

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def field(self) -> str:
        return COMPLEX if np.iscomplexobj(self.basis) else REAL

    def contains(self, z, tol: float = INDEPENDENCE_TOL) -> bool:
        z = as_vector(z, self.ambient_dim)
        if np.linalg.norm(z) == 0:
            return True
        return _smallest_singular(np.vstack([self.basis, z])) <= tol

    def with_direction(self, z) -> "Subspace":
        return Subspace(self.ambient_dim, np.vstack([self.basis, as_vector(z, self.ambient_dim)]))

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient_dim={self.ambient_dim})"


def _smallest_singular(rows) -> float:
    if rows.shape[0] == 0:
        return math.inf
    scaled = rows / np.linalg.norm(rows, axis=1, keepdims=True).clip(min=1e-300)
    return float(np.linalg.svd(scaled, compute_uv=False)[-1]) if rows.shape[0] <= rows.shape[1] else 0.0


@dataclass
class PartialFunctional:
    """``l`` on ``subspace`` given by its values on the basis, with bound ``L``."""

    subspace: Subspace
    values: np.ndarray
    bound: Optional[float] = None

    def __post_init__(self):
        self.values = as_vector(np.asarray(self.values).reshape(-1))
        if self.values.shape[0] != self.subspace.dim:
            raise DimMismatch(f"need {self.subspace.dim} values, got {self.values.shape[0]}")
        if self.bound is not None:
            self.bound = float(self.bound)
            if not self.bound >= 0:
                raise InvalidBound("the bound L must be nonnegative")

    def __call__(self, w):
        w = as_vector(w, self.subspace.ambient_dim)
        coef, *_ = np.linalg.lstsq(self.subspace.basis.T, w, rcond=None)
        return coef @ self.values


@dataclass
class ExtensionStep:
    direction: np.ndarray
    c_min: float
    c_max: float
    chosen: float

    def to_dict(self):
        return {"direction": self.direction, "c_min": self.c_min, "c_max": self.c_max,
                "chosen": self.chosen}


@dataclass
class ExtensionResult:
    functional: Functional
    steps: list = field(default_factory=list)
    minimal_bound: float = 0.0
    bound: float = 0.0
    restriction_error: float = 0.0
    extended_dual_norm: float = 0.0

    @property
    def ball_violation(self) -> float:
        """Excess of the extension's dual norm over ``L``, relative to ``max(L, 1)``."""
        return max(0.0, self.extended_dual_norm - self.bound) / max(self.bound, 1.0)


# ---------------------------------------------------------------------------
# LP construction


class _Builder:
    def __init__(self):
        self.bounds = []
        self.rows = []

    def variables(self, count, lo=None, hi=None):
        start = len(self.bounds)
        self.bounds += [(lo, hi)] * count
        return list(range(start, start + count))

    def add(self, coeffs: dict, relation: str, rhs: float):
        self.rows.append((coeffs, relation, float(rhs)))

    def solve(self, objective: dict):
        n = len(self.bounds)
        c = np.zeros(n)
        for j, a in objective.items():
            c[j] += a
        rows = []
        for coeffs, rel, rhs in self.rows:
            row = np.zeros(n)
            for j, a in coeffs.items():
                row[j] += a
            rows.append(Constraint(row, rel, rhs))
        return lp_solve(LinearProgram(c, rows, self.bounds))


def _affine_terms(M, a_vars, j):
    return {v: M[j, l] for l, v in enumerate(a_vars) if M[j, l] != 0.0}


def _add_epigraph(b: _Builder, spec: NormSpec, M, a_vars, z, r_var):
    """Constrain ``||M a + z|| <= r`` (``r_var`` an index, or None for r = 1)."""
    n = spec.dim
    r_coef = {} if r_var is None else {r_var: -1.0}
    r_const = 1.0 if r_var is None else 0.0

    def linear(row):  # (row . (M a)) as a coefficient dict
        weights = row @ M
        return {v: weights[l] for l, v in enumerate(a_vars) if weights[l] != 0.0}

    def bound_both(row):  # |row . y| <= r
        lin, off = linear(row), float(row @ z)
        b.add({**lin, **r_coef}, "<=", r_const - off)
        b.add({**{k: -x for k, x in lin.items()}, **r_coef}, "<=", r_const + off)

    kind = _lp_kind(spec)
    if kind == "linf":
        for j in range(n):
            row = np.zeros(n)
            row[j] = 1.0
            bound_both(row)
    elif kind == "facet":
        for f in spec.functionals:
            bound_both(f)
    elif kind == "l1":
        u = b.variables(n, 0.0, None)
        for j in range(n):
            lin = _affine_terms(M, a_vars, j)
            b.add({**lin, u[j]: -1.0}, "<=", -z[j])
            b.add({**{k: -x for k, x in lin.items()}, u[j]: -1.0}, "<=", z[j])
        b.add({**{x: 1.0 for x in u}, **r_coef}, "<=", r_const)
    elif kind == "vertex":
        G = spec.generators  # m x n
        t = b.variables(G.shape[0], 0.0, None)
        s = b.variables(G.shape[0], 0.0, None)
        for j in range(n):
            row = _affine_terms(M, a_vars, j)
            for i in range(G.shape[0]):
                if G[i, j] != 0.0:
                    row[t[i]] = -G[i, j]
                    row[s[i]] = G[i, j]
            b.add(row, "=", -z[j])
        b.add({**{x: 1.0 for x in t + s}, **r_coef}, "<=", r_const)
    else:
        raise Unsupported(f"no LP epigraph for {type(spec).__name__}")


def _lp_kind(spec):
    if isinstance(spec, LinfNorm) or (isinstance(spec, LpNorm) and math.isinf(spec.p)):
        return "linf"
    if isinstance(spec, L1Norm) or (isinstance(spec, LpNorm) and spec.p == 1.0):
        return "l1"
    if isinstance(spec, PolyFacetNorm):
        return "facet"
    if isinstance(spec, PolyVertexNorm):
        return "vertex"
    return None


def _as_ellipsoid(spec):
    if isinstance(spec, EllipsoidNorm):
        return spec
    if isinstance(spec, LpNorm) and spec.p == 2.0:
        return EllipsoidNorm.identity(spec.dim, spec.field)
    return None


def _check_supported(spec):
    if spec.field == REAL:
        if _lp_kind(spec) is None and _as_ellipsoid(spec) is None:
            raise Unsupported(f"{type(spec).__name__} has no exact subspace maximization")
    elif _as_ellipsoid(spec) is None:
        raise Unsupported("complex extension needs an ellipsoid (or l2) norm")


# ---------------------------------------------------------------------------
# realification of complex data


def _realify_vectors(vs):
    vs = np.asarray(vs, dtype=complex)
    return np.hstack([vs.real, vs.imag])


def _realify_spec(spec: EllipsoidNorm) -> EllipsoidNorm:
    A, B = spec.gram.real, spec.gram.imag
    return EllipsoidNorm(np.block([[A, -B], [B, A]]))


def _realify_partial(pf: PartialFunctional) -> PartialFunctional:
    basis = pf.subspace.basis.astype(complex)
    n = pf.subspace.ambient_dim
    real_basis = np.vstack([_realify_vectors(basis), _realify_vectors(1j * basis)])
    vals = pf.values.astype(complex)
    real_vals = np.concatenate([vals.real, -vals.imag])
    return PartialFunctional(Subspace(2 * n, real_basis.reshape(-1, 2 * n)), real_vals, pf.bound)


# ---------------------------------------------------------------------------
# operations


def minimal_bound(spec: NormSpec, subspace: Subspace, values) -> float:
    """The least ``L`` with ``|l(w)| <= L ||w||`` on ``subspace``."""
    if subspace.ambient_dim != spec.dim:
        raise DimMismatch("subspace and norm live in different dimensions")
    _check_supported(spec)
    pf = PartialFunctional(subspace, values)
    if spec.field == COMPLEX:
        return minimal_bound(_realify_spec(_as_ellipsoid(spec)), *_pf_parts(_realify_partial(pf)))
    if subspace.dim == 0:
        return 0.0
    y = np.asarray(pf.values, dtype=float)
    B = subspace.basis.astype(float)
    ell = _as_ellipsoid(spec)
    if ell is not None:
        gram_w = B @ ell.gram @ B.T
        return math.sqrt(max(float(y @ np.linalg.solve(gram_w, y)), 0.0))
    b = _Builder()
    a = b.variables(subspace.dim)
    _add_epigraph(b, spec, B.T, a, np.zeros(spec.dim), None)
    sol = b.solve({v: y[l] for l, v in enumerate(a)})
    if not sol.optimal:
        raise NumericalFailure(f"subspace ball LP ended with status {sol.status}")
    return abs(sol.objective_value)


def _pf_parts(pf):
    return pf.subspace, pf.values


def extend_one_dimension(spec: NormSpec, pf: PartialFunctional, z):
    """Feasible interval for ``l(z)`` and the functional extended by its midpoint."""
    if spec.field != REAL:
        raise Unsupported("single-step extension works over the reals; "
                          "use extend_functional for complex data")
    _check_supported(spec)
    if pf.bound is None:
        raise InvalidBound("a bound L is required")
    W = pf.subspace
    z = as_vector(z, spec.dim, REAL)
    if W.contains(z):
        raise NotNewDirection("z already lies in the subspace")
    L = pf.bound
    y = np.asarray(pf.values, dtype=float)
    B = W.basis.astype(float)

    ell = _as_ellipsoid(spec)
    if ell is not None:
        c_min, c_max = _ellipsoid_interval(ell.gram, B, y, z, L)
    else:
        c_max = -_epigraph_opt(spec, B, y, z, -L, +1.0, "c_max")
        c_min = _epigraph_opt(spec, B, y, z, -L, -1.0, "c_min")
    if c_min > c_max + 1e-9 * max(1.0, abs(c_max), abs(c_min)):
        raise NumericalFailure(f"empty extension interval [{c_min}, {c_max}]")
    chosen = 0.5 * (c_min + c_max)
    extended = PartialFunctional(W.with_direction(z), np.append(y, chosen), L)
    return (c_min, c_max), extended


def _epigraph_opt(spec, B, y, z, r_weight, y_sign, which):
    """``max r_weight * r + y_sign * y.a`` subject to ``||a B + z|| <= r``."""
    b = _Builder()
    a = b.variables(B.shape[0])
    (r,) = b.variables(1, 0.0, None)
    _add_epigraph(b, spec, B.T, a, z, r)
    objective = {r: r_weight, **{v: y_sign * y[l] for l, v in enumerate(a)}}
    sol = b.solve(objective)
    if sol.status == "unbounded":
        raise InvalidBound(f"{which} is unbounded: the functional exceeds the bound on W")
    if not sol.optimal:
        raise NumericalFailure(f"extension LP ({which}) ended with status {sol.status}")
    return sol.objective_value


def _ellipsoid_interval(G, B, y, z, L):
    # Riesz representer r of l in (W, <.,.>_G): l(w) = <r, w>, ||l|| = ||r||.
    Gz = G @ z
    zz = float(z @ Gz)
    if B.shape[0] == 0:
        center, l0sq, hsq = 0.0, 0.0, zz
    else:
        gram_w = B @ G @ B.T
        alpha = np.linalg.solve(gram_w, y)
        p = B @ Gz
        center = float(alpha @ p)
        l0sq = float(y @ alpha)
        hsq = zz - float(p @ np.linalg.solve(gram_w, p))
    if l0sq > L * L * (1 + 2 * BOUND_RTOL) + 1e-24:
        raise InvalidBound("the functional exceeds the bound on W")
    spread = math.sqrt(max(hsq, 0.0)) * math.sqrt(max(L * L - l0sq, 0.0))
    return center - spread, center + spread


def extend_with_certificate(spec: NormSpec, pf: PartialFunctional,
                            completion: Optional[Sequence] = None) -> ExtensionResult:
    """Extend ``pf`` to all of V and certify restriction and bound."""
    if pf.subspace.ambient_dim != spec.dim:
        raise DimMismatch("subspace and norm live in different dimensions")
    _check_supported(spec)
    L0 = minimal_bound(spec, pf.subspace, pf.values)
    L = L0 if pf.bound is None else pf.bound
    if L0 > L * (1 + BOUND_RTOL) + 1e-12:
        raise InvalidBound(f"|l(w)| <= L ||w|| fails on W: least valid bound is {L0}, got {L}",
                           minimal_bound=L0, bound=L)

    if spec.field == COMPLEX:
        real_spec = _realify_spec(_as_ellipsoid(spec))
        real_pf = _realify_partial(PartialFunctional(pf.subspace, pf.values, L))
        real_completion = None
        if completion is not None:
            directions = [as_vector(d, spec.dim).astype(complex) for d in completion]
            real_completion = [_realify_vectors(d) for d in directions] + \
                              [_realify_vectors(1j * d) for d in directions]
        real = _extend_real(real_spec, real_pf, L, real_completion)
        n = spec.dim
        pq = real.functional.coeffs
        coeffs = pq[:n] - 1j * pq[n:]
        steps = real.steps
    else:
        real = _extend_real(spec, PartialFunctional(pf.subspace, pf.values, L), L, completion)
        coeffs = real.functional.coeffs
        steps = real.steps

    lam = Functional(coeffs)
    B = pf.subspace.basis
    y = pf.values
    restriction = 0.0
    if B.shape[0]:
        restriction = float(np.abs(B @ coeffs - y).max() / max(1.0, float(np.abs(y).max())))
    result = ExtensionResult(lam, steps, L0, L, restriction, dual_norm(spec, lam).value)
    if result.ball_violation > CERTIFICATE_RTOL:
        raise NumericalFailure(f"extension exceeds the bound: {result.extended_dual_norm} > {L}")
    return result


def _extend_real(spec, pf, L, completion):
    n = spec.dim
    directions = [] if completion is None else [as_vector(d, n, REAL) for d in completion]
    directions += list(np.eye(n))
    steps = []
    current = pf
    for z in directions:
        if current.subspace.dim == n:
            break
        if current.subspace.contains(z):
            continue
        (c_min, c_max), current = extend_one_dimension(spec, current, z)
        steps.append(ExtensionStep(z, c_min, c_max, float(current.values[-1])))
    coeffs = np.linalg.solve(current.subspace.basis.astype(float), current.values.astype(float))
    return ExtensionResult(Functional(coeffs), steps)


def extend_functional(spec: NormSpec, pf: PartialFunctional,
                      completion: Optional[Sequence] = None) -> Functional:
    return extend_with_certificate(spec, pf, completion).functional


def extend_vector_valued(spec: NormSpec, W: Subspace, images, L: float,
                         codomain: Optional[FiniteSet] = None,
                         completion: Optional[Sequence] = None) -> MapToFunctions:
    """Extend ``T_W : W -> linf(E)`` componentwise, keeping ``||T|| <= L``.

    ``images`` gives ``T_W(b_j)`` for each basis vector ``b_j``: either a
    list of ``FnOnE`` or a ``(dim W, |E|)`` array together with ``codomain``.
    """
    if isinstance(images, (list, tuple)) and images and isinstance(images[0], FnOnE):
        codomain = images[0].base
        if any(f.base != codomain for f in images):
            raise DimMismatch("all images must live on the same finite set")
        table = np.array([f.values for f in images])
    else:
        if codomain is None:
            raise DimMismatch("codomain is required when images are given as an array")
        table = np.asarray(images).reshape(W.dim, codomain.size) if W.dim else \
            np.zeros((0, codomain.size))
    if table.shape != (W.dim, codomain.size):
        raise DimMismatch(f"images table has shape {table.shape}, expected {(W.dim, codomain.size)}")
    rows = []
    for i, label in enumerate(codomain.labels):
        pf = PartialFunctional(W, table[:, i], L)
        try:
            rows.append(extend_functional(spec, pf, completion))
        except InvalidBound as exc:
            raise InvalidBound(f"component {label!r}: {exc.detail}", label=label) from exc
    return MapToFunctions(codomain, rows)

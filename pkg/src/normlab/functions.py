"""Evaluatable functions on the unit sphere.

A small closed-form grammar (constants, coordinate projections, sums,
products, absolute values, the identity map and vectors of those) plus
value tables over a list of atoms. Expressions compose with ``+``, ``*``
and ``abs``.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

from .core import as_vector
from .errors import DimMismatch, MalformedInput, UndefinedAtPoint

TABLE_TOL = 1e-9


class SphereFunction:
    """Base class. ``arity`` is ``"scalar"`` or the output dimension."""

    arity = "scalar"

    def evaluate(self, points) -> np.ndarray:
        """Values at a batch ``(m, dim)`` of points: shape ``(m,)`` or ``(m, d)``."""
        raise NotImplementedError

    def __call__(self, v):
        pts = as_vector(v)
        return self.evaluate(pts[None, :])[0]

    @property
    def is_scalar(self) -> bool:
        return self.arity == "scalar"

    # closed-form structure used for exact sphere maxima
    def is_affine(self) -> bool:
        return False

    def is_constant(self) -> bool:
        return False

    def is_nonneg_convex(self) -> bool:
        return False

    def abs_is_convex(self) -> bool:
        """True when ``|f|`` is a convex function of the coordinates."""
        return self.is_affine() or self.is_nonneg_convex()

    def __add__(self, other):
        return Sum([self, _lift(other)])

    __radd__ = __add__

    def __mul__(self, other):
        return Prod([self, _lift(other)])

    __rmul__ = __mul__

    def __neg__(self):
        return Prod([Const(-1.0), self])

    def __sub__(self, other):
        return self + (-_lift(other))

    def __abs__(self):
        return Abs(self)

    def to_dict(self) -> dict:
        raise NotImplementedError

    def __eq__(self, other):
        return isinstance(other, SphereFunction) and _eq_key(self) == _eq_key(other)

    def __hash__(self):
        return hash(repr(_eq_key(self)))


def _eq_key(f):
    def norm(x):
        if isinstance(x, np.ndarray):
            return x.astype(complex if np.iscomplexobj(x) else float).tolist()
        if isinstance(x, dict):
            return {k: norm(v) for k, v in x.items()}
        if isinstance(x, (list, tuple)):
            return [norm(v) for v in x]
        return x
    return repr(norm(f.to_dict()))


def _lift(x) -> SphereFunction:
    return x if isinstance(x, SphereFunction) else Const(x)


def _require_scalar(fns):
    for f in fns:
        if not f.is_scalar:
            raise MalformedInput("expected a scalar-valued function")


class Const(SphereFunction):
    def __init__(self, value):
        self.value = complex(value) if np.iscomplexobj(value) else float(value)

    def evaluate(self, points):
        points = np.asarray(points)
        return np.full(points.shape[0], self.value)

    def is_affine(self):
        return True

    def is_constant(self):
        return True

    def is_nonneg_convex(self):
        return isinstance(self.value, float) and self.value >= 0

    def to_dict(self):
        return {"const": self.value}

    def __repr__(self):
        return f"Const({self.value})"


class Coord(SphereFunction):
    """The coordinate projection ``v -> v[index]``."""

    def __init__(self, index: int):
        if int(index) != index or index < 0:
            raise MalformedInput(f"coordinate index must be a nonnegative integer, got {index!r}")
        self.index = int(index)

    def evaluate(self, points):
        points = np.asarray(points)
        if points.shape[1] <= self.index:
            raise DimMismatch(f"coordinate {self.index} out of range for dimension {points.shape[1]}")
        return points[:, self.index]

    def is_affine(self):
        return True

    def to_dict(self):
        return {"coord": self.index}

    def __repr__(self):
        return f"Coord({self.index})"


class Sum(SphereFunction):
    def __init__(self, terms: Sequence[SphereFunction]):
        terms = [_lift(t) for t in terms]
        _require_scalar(terms)
        self.terms = terms

    def evaluate(self, points):
        points = np.asarray(points)
        total = np.zeros(points.shape[0])
        for t in self.terms:
            total = total + t.evaluate(points)
        return total

    def is_affine(self):
        return all(t.is_affine() for t in self.terms)

    def is_constant(self):
        return all(t.is_constant() for t in self.terms)

    def is_nonneg_convex(self):
        return all(t.is_nonneg_convex() for t in self.terms)

    def to_dict(self):
        return {"sum": [t.to_dict() for t in self.terms]}


class Prod(SphereFunction):
    def __init__(self, factors: Sequence[SphereFunction]):
        factors = [_lift(f) for f in factors]
        _require_scalar(factors)
        self.factors = factors

    def evaluate(self, points):
        points = np.asarray(points)
        total = np.ones(points.shape[0])
        for f in self.factors:
            total = total * f.evaluate(points)
        return total

    def _split(self):
        consts = [f for f in self.factors if f.is_constant()]
        rest = [f for f in self.factors if not f.is_constant()]
        return consts, rest

    def _const_value(self, consts):
        value = 1.0
        for c in consts:
            value = value * c.evaluate(np.zeros((1, 1)))[0]
        return value

    def is_affine(self):
        consts, rest = self._split()
        return len(rest) <= 1 and all(f.is_affine() for f in rest)

    def is_constant(self):
        return all(f.is_constant() for f in self.factors)

    def is_nonneg_convex(self):
        consts, rest = self._split()
        scale = self._const_value(consts)
        if np.iscomplexobj(scale) or scale < 0:
            return False
        return len(rest) <= 1 and all(f.is_nonneg_convex() for f in rest)

    def to_dict(self):
        return {"prod": [f.to_dict() for f in self.factors]}


class Abs(SphereFunction):
    def __init__(self, arg: SphereFunction):
        arg = _lift(arg)
        _require_scalar([arg])
        self.arg = arg

    def evaluate(self, points):
        return np.abs(self.arg.evaluate(points))

    def is_affine(self):
        return self.arg.is_constant()

    def is_constant(self):
        return self.arg.is_constant()

    def is_nonneg_convex(self):
        return self.arg.is_affine() or self.arg.is_nonneg_convex()

    def to_dict(self):
        return {"abs": self.arg.to_dict()}


class Identity(SphereFunction):
    """The vector-valued map ``v -> v``."""

    def __init__(self, dim: int):
        self.arity = int(dim)

    def evaluate(self, points):
        points = np.asarray(points)
        if points.shape[1] != self.arity:
            raise DimMismatch(f"identity on dimension {self.arity} applied to {points.shape[1]}")
        return points

    def components(self):
        return [Coord(i) for i in range(self.arity)]

    def to_dict(self):
        return {"identity": self.arity}


class VectorFunction(SphereFunction):
    """A vector of scalar closed-form components."""

    def __init__(self, components: Sequence[SphereFunction]):
        comps = [_lift(c) for c in components]
        _require_scalar(comps)
        if not comps:
            raise MalformedInput("a vector function needs at least one component")
        self._components = comps
        self.arity = len(comps)

    @classmethod
    def constant(cls, u):
        return cls([Const(x) for x in np.asarray(u).tolist()])

    def evaluate(self, points):
        return np.stack([c.evaluate(points) for c in self._components], axis=1)

    def components(self):
        return list(self._components)

    def to_dict(self):
        return {"vector": [c.to_dict() for c in self._components]}


class Table(SphereFunction):
    """Values given at finitely many points; undefined elsewhere."""

    def __init__(self, points, values):
        pts = as_vector(np.atleast_2d(points))
        vals = np.asarray(values)
        if vals.dtype == object:
            raise MalformedInput("table values must be numeric")
        if vals.shape[0] != pts.shape[0]:
            raise DimMismatch("one table value per point")
        self.points = pts
        self.values = vals
        self.arity = "scalar" if vals.ndim == 1 else vals.shape[1]

    def lookup(self, points):
        points = np.asarray(points)
        if points.shape[1] != self.points.shape[1]:
            raise DimMismatch("table points and query points differ in dimension")
        diff = np.abs(points[:, None, :] - self.points[None, :, :]).max(axis=2)
        idx = diff.argmin(axis=1)
        misses = diff[np.arange(len(points)), idx] > TABLE_TOL
        if misses.any():
            bad = points[np.flatnonzero(misses)[0]]
            raise UndefinedAtPoint(f"table has no value at {bad.tolist()}")
        return idx

    def evaluate(self, points):
        points = np.asarray(points)
        if len(points) == 0:
            return self.values[:0]
        return self.values[self.lookup(points)]

    def to_dict(self):
        return {"table": {"points": self.points, "values": self.values,
                          "arity": self.arity}}


def compose_functional(F: SphereFunction, lam) -> SphereFunction:
    """The scalar function ``v -> lam(F(v))`` for vector-valued ``F``."""
    coeffs = np.asarray(getattr(lam, "coeffs", lam))
    if F.is_scalar or F.arity != coeffs.shape[0]:
        raise DimMismatch("functional does not match the function's output dimension")
    if isinstance(F, Table):
        return Table(F.points, F.values @ coeffs)
    return Sum([Prod([Const(c), comp]) for c, comp in zip(coeffs.tolist(), F.components())])


def coordinates(dim: int) -> list:
    return [Coord(i) for i in range(dim)]


def from_dict(data) -> SphereFunction:
    """Parse the JSON form of a function (strict about keys)."""
    from .io import decode_scalar, decode_vectors  # local: io depends on this module

    if not isinstance(data, dict) or len(data) != 1:
        raise MalformedInput(f"a function is a single-key object, got {data!r}")
    (key, val), = data.items()
    if key == "const":
        return Const(decode_scalar(val))
    if key == "coord":
        return Coord(val)
    if key == "sum":
        return Sum([from_dict(t) for t in val])
    if key == "prod":
        return Prod([from_dict(t) for t in val])
    if key == "abs":
        return Abs(from_dict(val))
    if key == "identity":
        return Identity(val)
    if key == "vector":
        return VectorFunction([from_dict(t) for t in val])
    if key == "table":
        # "arity" disambiguates complex scalar values ([re, im]) from 2-vectors
        if not isinstance(val, dict) or not {"points", "values"} <= set(val) \
                or not set(val) <= {"points", "values", "arity"}:
            raise MalformedInput("table needs 'points' and 'values' (and optionally 'arity')")
        points = decode_vectors(val["points"])
        raw = val["values"]
        arity = val.get("arity")
        if arity is None:
            arity = "vector" if raw and isinstance(raw[0], list) else "scalar"
        if arity == "scalar":
            values = np.array([decode_scalar(x) for x in raw])
        else:
            values = decode_vectors(raw)
        return Table(points, values)
    raise MalformedInput(f"unknown function form {key!r}")


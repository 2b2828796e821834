"""Scalars, the finite index set E, functions on E, vectors and functionals.

Vectors in V are plain one-dimensional numpy arrays holding coordinates in
the working basis. Functions on E and linear functionals get small wrapper
types because they carry extra structure (a label set, an action).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimMismatch, FieldMismatch, LabelNotFound, MalformedInput

REAL = "real"
COMPLEX = "complex"
FIELDS = (REAL, COMPLEX)


def field_of(array) -> str:
    return COMPLEX if np.iscomplexobj(array) else REAL


def check_field(field: str) -> str:
    if field not in FIELDS:
        raise MalformedInput(f"unknown scalar field {field!r}")
    return field


def as_vector(v, dim: int | None = None, field: str | None = None) -> np.ndarray:
    """Coerce ``v`` to a coordinate array (batched along leading axes).

    A real array is accepted where complex scalars are expected and is
    upcast; a complex array in a real computation is a ``FieldMismatch``.
    """
    arr = np.asarray(v)
    if arr.dtype == object or not np.issubdtype(arr.dtype, np.number):
        raise MalformedInput("vector coordinates must be numeric")
    if arr.ndim == 0:
        raise DimMismatch("expected a vector, got a scalar")
    if dim is not None and arr.shape[-1] != dim:
        raise DimMismatch(f"expected dimension {dim}, got {arr.shape[-1]}")
    if field == REAL:
        if np.iscomplexobj(arr):
            raise FieldMismatch("complex coordinates in a real computation")
        return arr.astype(float, copy=False)
    if field == COMPLEX:
        return arr.astype(complex, copy=False)
    return arr.astype(complex if np.iscomplexobj(arr) else float, copy=False)


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class FiniteSet:
    """An ordered finite set of distinct string labels."""

    labels: tuple[str, ...]

    def __init__(self, labels: Sequence[str]):
        labels = tuple(str(x) for x in labels)
        if not labels:
            raise MalformedInput("a finite set needs at least one label")
        if len(set(labels)) != len(labels):
            raise MalformedInput("labels must be pairwise distinct")
        object.__setattr__(self, "labels", labels)

    @property
    def size(self) -> int:
        return len(self.labels)

    def __len__(self):
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)

    def __contains__(self, label):
        return label in self.labels

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise LabelNotFound(f"label {label!r} is not an element of the set",
                                label=label) from None


class FnOnE:
    """A scalar-valued function on a finite set, stored in label order."""

    __slots__ = ("base", "values")

    def __init__(self, base: FiniteSet, values):
        values = as_vector(values)
        if values.ndim != 1 or values.shape[0] != base.size:
            raise DimMismatch(
                f"function needs {base.size} values, got {values.shape}")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "values", _frozen(values))

    def __setattr__(self, name, value):
        raise AttributeError("FnOnE is immutable")

    @property
    def field(self) -> str:
        return field_of(self.values)

    def __getitem__(self, label):
        return self.values[self.base.index(label)]

    def __eq__(self, other):
        return (isinstance(other, FnOnE) and self.base == other.base
                and np.array_equal(self.values, other.values))

    def __hash__(self):
        return hash((self.base, self.values.tobytes()))

    def __repr__(self):
        return f"FnOnE({dict(zip(self.base.labels, self.values.tolist()))})"


class Functional:
    """A linear functional on V, acting by ``v -> sum(coeffs[i] * v[i])``.

    The pairing is bilinear (no conjugation) so the action is complex-linear
    in ``v`` when the field is complex.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        coeffs = as_vector(coeffs)
        if coeffs.ndim != 1:
            raise DimMismatch("functional coefficients must be one-dimensional")
        object.__setattr__(self, "coeffs", _frozen(coeffs))

    def __setattr__(self, name, value):
        raise AttributeError("Functional is immutable")

    @property
    def dim(self) -> int:
        return self.coeffs.shape[0]

    @property
    def field(self) -> str:
        return field_of(self.coeffs)

    def __call__(self, v):
        v = as_vector(v, self.dim)
        return v @ self.coeffs

    def __eq__(self, other):
        return isinstance(other, Functional) and np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self):
        return hash(self.coeffs.tobytes())

    def __repr__(self):
        return f"Functional({self.coeffs.tolist()})"


def as_functional(lam) -> Functional:
    return lam if isinstance(lam, Functional) else Functional(lam)


def delta(E: FiniteSet, x: str) -> FnOnE:
    """Indicator function of the label ``x``."""
    values = np.zeros(E.size)
    values[E.index(x)] = 1.0
    return FnOnE(E, values)


def l1_norm(f: FnOnE) -> float:
    return float(np.sum(np.abs(f.values)))


def linf_norm(f: FnOnE) -> float:
    return float(np.max(np.abs(f.values)))


def first_argmax(values, rtol: float = 1e-12) -> int:
    """Index of the first entry within ``rtol`` (relative) of the maximum."""
    values = np.asarray(values, dtype=float)
    top = values.max()
    cutoff = top - rtol * max(abs(top), 1e-300)
    return int(np.flatnonzero(values >= cutoff)[0])


def unit_phase(z):
    """``conj(z)/|z|`` elementwise, with 1 where ``z`` vanishes."""
    z = np.asarray(z)
    mag = np.abs(z)
    safe = np.where(mag > 0, mag, 1.0)
    if np.iscomplexobj(z):
        return np.where(mag > 0, np.conj(z) / safe, 1.0 + 0j)
    return np.where(mag > 0, np.sign(z), 1.0)

"""Linear maps between functions on E and V, and their exact induced norms.

``MapFromFunctions`` is stored by columns (column x is ``A(delta_x)``) and
``MapToFunctions`` by rows (row x is the functional ``v -> T(v)(x)``). The
induced norms are the finite formulas: the largest column norm for
``l1(E) -> V`` and the largest row dual norm for ``V -> linf(E)``.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .core import FiniteSet, FnOnE, Functional, as_vector, first_argmax
from .duality import dual_norm
from .errors import DimMismatch, NumericalFailure
from .norms import NormSpec, random_vectors


class MapFromFunctions:
    def __init__(self, domain: FiniteSet, columns):
        cols = as_vector(columns)
        if cols.ndim != 2 or cols.shape[0] != domain.size:
            raise DimMismatch(f"need one column per label ({domain.size}), got {cols.shape}")
        cols.setflags(write=False)
        self.domain = domain
        self.columns = cols

    @property
    def codomain_dim(self) -> int:
        return self.columns.shape[1]

    def column(self, label) -> np.ndarray:
        return self.columns[self.domain.index(label)]

    def __eq__(self, other):
        return (isinstance(other, MapFromFunctions) and self.domain == other.domain
                and np.array_equal(self.columns, other.columns))

    def __repr__(self):
        return f"MapFromFunctions({list(self.domain.labels)}, dim={self.codomain_dim})"


class MapToFunctions:
    def __init__(self, codomain: FiniteSet, rows):
        rows = as_vector([r.coeffs if isinstance(r, Functional) else r for r in rows])
        if rows.ndim != 2 or rows.shape[0] != codomain.size:
            raise DimMismatch(f"need one row per label ({codomain.size}), got {rows.shape}")
        rows.setflags(write=False)
        self.codomain = codomain
        self.rows = rows

    @property
    def domain_dim(self) -> int:
        return self.rows.shape[1]

    def row(self, label) -> Functional:
        return Functional(self.rows[self.codomain.index(label)])

    def __eq__(self, other):
        return (isinstance(other, MapToFunctions) and self.codomain == other.codomain
                and np.array_equal(self.rows, other.rows))

    def __repr__(self):
        return f"MapToFunctions({list(self.codomain.labels)}, dim={self.domain_dim})"


def apply_from(A: MapFromFunctions, f: FnOnE) -> np.ndarray:
    if f.base != A.domain:
        raise DimMismatch("function lives on a different finite set than the map's domain")
    return f.values @ A.columns


def apply_to(T: MapToFunctions, v) -> FnOnE:
    v = as_vector(v, T.domain_dim)
    return FnOnE(T.codomain, T.rows @ v)


class L1ToVNorm(NamedTuple):
    value: float
    witness_label: str
    audit_ratio: float


class VToLinfNorm(NamedTuple):
    value: float
    witness_label: str
    witness_vector: np.ndarray
    audit_ratio: float


def opnorm_l1_to_V(A: MapFromFunctions, spec: NormSpec, audit: int = 32,
                   seed: int = 0) -> L1ToVNorm:
    """``max_x ||A(delta_x)||``, attained at ``delta_x`` for the witness label.

    ``audit`` random functions are pushed through ``A`` as a secondary check
    of ``||A f|| <= value * ||f||_1``; ``audit_ratio`` is the largest ratio
    seen (``nan`` when ``audit == 0``).
    """
    if spec.dim != A.codomain_dim:
        raise DimMismatch(f"map lands in dimension {A.codomain_dim}, norm has {spec.dim}")
    col_norms = np.asarray(spec(A.columns), dtype=float)
    k = first_argmax(col_norms)
    value = float(col_norms.max())
    ratio = float("nan")
    if audit:
        rng = np.random.default_rng(seed)
        f = random_vectors(rng, audit, A.domain.size, spec.field)
        ratios = spec(f @ A.columns) / np.sum(np.abs(f), axis=1)
        ratio = float(ratios.max())
        if ratio > value * (1 + 1e-9) + 1e-12:
            raise NumericalFailure("operator norm audit found a larger ratio")
    return L1ToVNorm(value, A.domain.labels[k], ratio)


def opnorm_V_to_linf(T: MapToFunctions, spec: NormSpec, audit: int = 32,
                     seed: int = 0) -> VToLinfNorm:
    """``max_x ||l_x||_*``, certified by the dual witness of the maximizing row."""
    if spec.dim != T.domain_dim:
        raise DimMismatch(f"map starts in dimension {T.domain_dim}, norm has {spec.dim}")
    results = [dual_norm(spec, row) for row in T.rows]
    values = np.array([r.value for r in results])
    k = first_argmax(values)
    value = float(values.max())
    ratio = float("nan")
    if audit:
        rng = np.random.default_rng(seed)
        v = random_vectors(rng, audit, spec.dim, spec.field)
        ratios = np.abs(v @ T.rows.T).max(axis=1) / spec(v)
        ratio = float(ratios.max())
        if ratio > value * (1 + 1e-9) + 1e-12:
            raise NumericalFailure("operator norm audit found a larger ratio")
    return VToLinfNorm(value, T.codomain.labels[k], results[k].witness, ratio)

"""JSON encoding of the domain objects.

Scalars are numbers, or ``[re, im]`` pairs for complex values. Vectors and
functions on E are arrays of scalars in canonical order; matrices are
row-major. Parsing is strict: unknown keys raise ``MalformedInput``.
"""
from __future__ import annotations

import dataclasses
import json
import math
from numbers import Number

import numpy as np

from .core import COMPLEX, REAL, FiniteSet, FnOnE, Functional
from .errors import MalformedInput, NormLabError
from .norms import (EllipsoidNorm, L1Norm, LinfNorm, LpNorm, NormSpec,
                    PolyFacetNorm, PolyVertexNorm)


# ---------------------------------------------------------------------------
# encoding


def _encode_number(x):
    if isinstance(x, (complex, np.complexfloating)):
        return [_encode_number(float(x.real)), _encode_number(float(x.imag))]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    x = float(x)
    return x if math.isfinite(x) else None


def to_jsonable(obj):
    """Recursively convert arrays, numpy scalars and domain objects."""
    from .functions import SphereFunction
    from .measures import DiscreteMeasure
    from .operators import MapFromFunctions, MapToFunctions

    if obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, (Number, np.number, np.bool_)):
        return _encode_number(obj)
    if isinstance(obj, np.ndarray):
        if obj.ndim == 0:
            return _encode_number(obj[()])
        return [to_jsonable(x) for x in obj]
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(x) for x in obj]
    if isinstance(obj, Functional):
        return to_jsonable(obj.coeffs)
    if isinstance(obj, FiniteSet):
        return list(obj.labels)
    if isinstance(obj, FnOnE):
        return {"base": list(obj.base.labels), "values": to_jsonable(obj.values)}
    if isinstance(obj, NormSpec):
        return to_jsonable(obj.to_dict())
    if isinstance(obj, MapFromFunctions):
        return {"domain": list(obj.domain.labels), "columns": to_jsonable(obj.columns)}
    if isinstance(obj, MapToFunctions):
        return {"codomain": list(obj.codomain.labels), "rows": to_jsonable(obj.rows)}
    if isinstance(obj, DiscreteMeasure):
        return measure_to_dict(obj)
    if isinstance(obj, SphereFunction):
        return to_jsonable(obj.to_dict())
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    if dataclasses.is_dataclass(obj):
        return to_jsonable(dataclasses.asdict(obj))
    raise TypeError(f"cannot encode {type(obj).__name__} as JSON")


def dumps(obj, **kwargs) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, allow_nan=False, **kwargs)


def measure_to_dict(mu) -> dict:
    return {"norm": to_jsonable(mu.spec), "atoms": [
        {"point": to_jsonable(p), "weight": to_jsonable(w)} for p, w in mu.atoms]}


# ---------------------------------------------------------------------------
# decoding


def check_keys(data, required, optional=(), what="object"):
    if not isinstance(data, dict):
        raise MalformedInput(f"{what} must be a JSON object")
    missing = set(required) - set(data)
    unknown = set(data) - set(required) - set(optional)
    if missing:
        raise MalformedInput(f"{what} is missing keys {sorted(missing)}")
    if unknown:
        raise MalformedInput(f"{what} has unknown keys {sorted(unknown)}")


def _is_real_number(x):
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def decode_scalar(x):
    if _is_real_number(x):
        return float(x)
    if isinstance(x, list) and len(x) == 2 and all(_is_real_number(t) for t in x):
        return complex(float(x[0]), float(x[1]))
    raise MalformedInput(f"expected a number or an [re, im] pair, got {x!r}")


def decode_vector(x) -> np.ndarray:
    if not isinstance(x, list) or not x:
        raise MalformedInput(f"expected a non-empty array of scalars, got {x!r}")
    vals = [decode_scalar(t) for t in x]
    if any(isinstance(v, complex) for v in vals):
        return np.array(vals, dtype=complex)
    return np.array(vals, dtype=float)


def decode_vectors(x) -> np.ndarray:
    if not isinstance(x, list):
        raise MalformedInput("expected an array of vectors")
    if not x:
        return np.zeros((0, 0))
    rows = [decode_vector(r) for r in x]
    if len({len(r) for r in rows}) != 1:
        raise MalformedInput("vectors have different lengths")
    return np.array(rows, dtype=complex if any(np.iscomplexobj(r) for r in rows) else float)


def spec_from_dict(data) -> NormSpec:
    if not isinstance(data, dict) or "variant" not in data:
        raise MalformedInput("a norm spec needs a 'variant' tag")
    variant = data["variant"]
    try:
        if variant in ("L1", "Linf"):
            check_keys(data, {"variant", "dim"}, {"field"}, "norm spec")
            cls = L1Norm if variant == "L1" else LinfNorm
            return cls(data["dim"], data.get("field", REAL))
        if variant == "Lp":
            check_keys(data, {"variant", "dim", "p"}, {"field"}, "norm spec")
            p = math.inf if data["p"] in ("inf", "Infinity") else data["p"]
            if not _is_real_number(p):
                raise MalformedInput("p must be a number or 'inf'")
            return LpNorm(data["dim"], p, data.get("field", REAL))
        if variant == "PolyVertex":
            check_keys(data, {"variant", "generators"}, {"dim", "field"}, "norm spec")
            spec = PolyVertexNorm(decode_vectors(data["generators"]), data.get("field", REAL))
        elif variant == "PolyFacet":
            check_keys(data, {"variant", "functionals"}, {"dim", "field"}, "norm spec")
            spec = PolyFacetNorm(decode_vectors(data["functionals"]), data.get("field", REAL))
        elif variant == "Ellipsoid":
            check_keys(data, {"variant", "gram"}, {"dim", "field"}, "norm spec")
            spec = EllipsoidNorm(decode_vectors(data["gram"]), data.get("field"))
        else:
            raise MalformedInput(f"unknown norm variant {variant!r}")
    except (TypeError, ValueError) as exc:
        raise MalformedInput(f"bad norm spec: {exc}") from exc
    if "dim" in data and data["dim"] != spec.dim:
        raise MalformedInput(f"declared dim {data['dim']} does not match data ({spec.dim})")
    return spec


def functional_from_json(data) -> Functional:
    if isinstance(data, dict):
        check_keys(data, {"coeffs"}, (), "functional")
        data = data["coeffs"]
    return Functional(decode_vector(data))


def vector_from_json(data) -> np.ndarray:
    if isinstance(data, dict):
        check_keys(data, {"coords"}, (), "vector")
        data = data["coords"]
    return decode_vector(data)


def finite_set_from_json(data) -> FiniteSet:
    if not isinstance(data, list) or not all(isinstance(x, str) for x in data):
        raise MalformedInput("a finite set is an array of strings")
    return FiniteSet(data)


def fn_on_e_from_json(data) -> FnOnE:
    check_keys(data, {"base", "values"}, (), "function on E")
    return FnOnE(finite_set_from_json(data["base"]), decode_vector(data["values"]))


def map_from_json(data):
    from .operators import MapFromFunctions, MapToFunctions

    if isinstance(data, dict) and "columns" in data:
        check_keys(data, {"domain", "columns"}, (), "map from functions")
        return MapFromFunctions(finite_set_from_json(data["domain"]), decode_vectors(data["columns"]))
    check_keys(data, {"codomain", "rows"}, (), "map to functions")
    return MapToFunctions(finite_set_from_json(data["codomain"]), decode_vectors(data["rows"]))


def subspace_from_json(data, ambient_dim=None):
    from .hahn_banach import Subspace

    if isinstance(data, list):
        basis = decode_vectors(data)
        if ambient_dim is None:
            if basis.shape[0] == 0:
                raise MalformedInput("ambient_dim is required for an empty basis")
            ambient_dim = basis.shape[1]
        return Subspace(ambient_dim, basis)
    check_keys(data, {"basis"}, {"ambient_dim"}, "subspace")
    dim = data.get("ambient_dim", ambient_dim)
    basis = decode_vectors(data["basis"])
    if dim is None:
        if basis.shape[0] == 0:
            raise MalformedInput("ambient_dim is required for an empty basis")
        dim = basis.shape[1]
    return Subspace(dim, basis)


def measure_from_json(data):
    from .measures import DiscreteMeasure

    check_keys(data, {"norm", "atoms"}, (), "measure")
    spec = spec_from_dict(data["norm"])
    if not isinstance(data["atoms"], list):
        raise MalformedInput("atoms must be an array")
    points, weights = [], []
    for atom in data["atoms"]:
        check_keys(atom, {"point", "weight"}, (), "atom")
        points.append(decode_vector(atom["point"]))
        weights.append(decode_scalar(atom["weight"]))
    if not points:
        return DiscreteMeasure(spec)
    return DiscreteMeasure(spec, np.array(points), np.array(weights))


def function_from_json(data):
    from .functions import from_dict

    return from_dict(data)


def load_json(path):
    """Read a JSON file; missing files raise ``FileNotFound`` (exit code 2 in the CLI)."""
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise FileNotFound(f"no such file: {path}", path=str(path)) from None
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"{path}: invalid JSON ({exc})", path=str(path)) from None


class FileNotFound(MalformedInput):
    code = "FILE_NOT_FOUND"


__all__ = [
    "to_jsonable", "dumps", "decode_scalar", "decode_vector", "decode_vectors",
    "spec_from_dict", "functional_from_json", "vector_from_json", "finite_set_from_json",
    "fn_on_e_from_json", "map_from_json", "subspace_from_json", "measure_from_json",
    "function_from_json", "measure_to_dict", "load_json", "check_keys", "FileNotFound", "NormLabError",
    "COMPLEX",
]

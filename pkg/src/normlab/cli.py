"""Command line front end.

Every operation reads JSON files and prints one JSON object on stdout.
Exit codes: 0 success, 1 domain error, 2 malformed input or missing file.
"""
from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import duality, hahn_banach, io, measures, operators, plot, verify
from .errors import MalformedInput, NormLabError
from .lp import record_lps
from .norms import check_norm_axioms


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _display_digits() -> int:
    raw = os.environ.get("NORMLAB_TOLERANCE", "1e-9")
    try:
        tol = float(raw)
    except ValueError:
        raise MalformedInput(f"NORMLAB_TOLERANCE must be a number, got {raw!r}") from None
    if not 0 < tol < 1:
        raise MalformedInput("NORMLAB_TOLERANCE must lie in (0, 1)")
    return max(0, int(-math.floor(math.log10(tol))))


def _num(x):
    """Round a scalar result for display (never applied to domain objects)."""
    digits = _display_digits()
    if isinstance(x, (complex, np.complexfloating)):
        return complex(round(x.real, digits) + 0.0, round(x.imag, digits) + 0.0)
    return round(float(x), digits) + 0.0


class _Inline:
    """A payload taken from a problem file instead of a path on disk."""

    def __init__(self, data):
        self.data = data


def _load(path):
    return path.data if isinstance(path, _Inline) else io.load_json(path)


def _spec(args):
    return io.spec_from_dict(_load(args.spec))


# ---------------------------------------------------------------------------
# subcommand handlers


def cmd_norm_eval(args):
    spec = _spec(args)
    v = io.vector_from_json(_load(args.vector))
    return {"value": _num(spec(v)), "norm": spec, "vector": v}


def cmd_norm_axioms(args):
    rep = check_norm_axioms(_spec(args), trials=args.trials, seed=args.seed)
    return {"ok": rep.ok, **rep.to_dict()}


def cmd_dual_norm(args):
    spec = _spec(args)
    lam = io.functional_from_json(_load(args.functional))
    res = duality.dual_norm(spec, lam)
    return {"value": _num(res.value), "witness": res.witness, "method": res.method}


def cmd_dual_polar(args):
    return {"norm": duality.polar_dual_spec(_spec(args))}


def cmd_dual_norming(args):
    spec = _spec(args)
    v = io.vector_from_json(_load(args.vector))
    lam = duality.norming_functional(spec, v)
    return {"functional": lam, "dual_norm": _num(duality.dual_norm(spec, lam).value),
            "pairing": _num(lam(v)), "norm_of_vector": _num(spec(v))}


def _load_map(path):
    return io.map_from_json(_load(path))


def cmd_opnorm_l1v(args):
    A = _load_map(args.map)
    if not isinstance(A, operators.MapFromFunctions):
        raise MalformedInput("opnorm l1v needs a map given by 'domain' and 'columns'")
    res = operators.opnorm_l1_to_V(A, _spec(args), audit=args.audit, seed=args.seed)
    return {"value": _num(res.value), "witness_label": res.witness_label,
            "audit_ratio": res.audit_ratio}


def cmd_opnorm_vlinf(args):
    T = _load_map(args.map)
    if not isinstance(T, operators.MapToFunctions):
        raise MalformedInput("opnorm vlinf needs a map given by 'codomain' and 'rows'")
    res = operators.opnorm_V_to_linf(T, _spec(args), audit=args.audit, seed=args.seed)
    return {"value": _num(res.value), "witness_label": res.witness_label,
            "witness_vector": res.witness_vector, "audit_ratio": res.audit_ratio}


def cmd_extend(args):
    spec = _spec(args)
    W = io.subspace_from_json(_load(args.subspace), spec.dim)
    raw = _load(args.values)
    if isinstance(raw, dict):
        io.check_keys(raw, {"codomain", "images"}, (), "values")
        E = io.finite_set_from_json(raw["codomain"])
        images = io.decode_vectors(raw["images"]) if raw["images"] else np.zeros((0, E.size))
        if args.bound is None:
            raise MalformedInput("vector-valued extension needs --bound")
        T = hahn_banach.extend_vector_valued(spec, W, images, args.bound, codomain=E)
        norm = operators.opnorm_V_to_linf(T, spec, audit=0)
        return {"map": T, "operator_norm": _num(norm.value), "bound": _num(args.bound)}
    values = io.decode_vector(raw) if raw else np.zeros(0)
    res = hahn_banach.extend_with_certificate(
        spec, hahn_banach.PartialFunctional(W, values, args.bound))
    return {"functional": res.functional, "steps": res.steps,
            "minimal_bound": _num(res.minimal_bound), "bound": _num(res.bound),
            "restriction_error": res.restriction_error,
            "extended_dual_norm": _num(res.extended_dual_norm),
            "ball_violation": res.ball_violation}


def _measure(path):
    return io.measure_from_json(_load(path))


def _function(path):
    return io.function_from_json(_load(path))


def cmd_measure_tv(args):
    mu = _measure(args.measure)
    res = measures.tv_norm(mu)
    return {"value": _num(res.value), "k_is_minimal": res.k_is_minimal,
            "canonical": measures.canonicalize(mu)}


def cmd_measure_barycenter(args):
    mu = _measure(args.measure)
    return {"barycenter": measures.barycenter(mu), "tv_norm": _num(measures.tv_norm(mu).value)}


def cmd_measure_multiply(args):
    mu = _measure(args.measure)
    phi = _function(args.function)
    rep = measures.multiply_bound_check(mu, phi)
    return {"measure": measures.multiply(mu, phi), "check": rep}


def cmd_measure_gap(args):
    mu, nu = _measure(args.measure), _measure(args.other)
    tests = _load(args.tests)
    if not isinstance(tests, list):
        raise MalformedInput("the test family is an array of functions")
    return {"gap": _num(measures.weakstar_gap(mu, nu, [io.function_from_json(t) for t in tests])),
            "tests": len(tests)}


def cmd_measure_nonneg(args):
    return {"nonnegative": measures.is_nonnegative(_measure(args.measure))}


def cmd_measure_integrate(args):
    mu = _measure(args.measure)
    f = _function(args.function)
    if f.is_scalar:
        return {"value": _num(measures.integrate_scalar(mu, f))}
    return {"vector": measures.integrate_vector(mu, f, codomain_dim=f.arity)}


def cmd_measure_dirac(args):
    spec = _spec(args)
    v = io.vector_from_json(_load(args.vector))
    return {"measure": measures.dirac(spec, v)}


def cmd_verify_run(args):
    if args.config:
        data = _load(args.config)
        io.check_keys(data, {"cases"}, (), "verify config")
        if not isinstance(data["cases"], list):
            raise MalformedInput("'cases' must be an array")
        cases = [verify.PropertyCase.from_dict(c) for c in data["cases"]]
    else:
        cases = verify.default_cases(args.trials)
    report = verify.run_suite(cases, seed=args.seed)
    payload = report.to_dict(timing=args.timing)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(io.dumps(payload, indent=2) + "\n")
    summary = {"passed": report.passed, "seed": args.seed, "cases": len(report.results),
               "failed": [r.index for r in report.results if not r.passed]}
    if not args.out:
        summary["report"] = payload
    return summary, (0 if report.passed else 1)


def cmd_plot(args):
    res = plot.plot_balls(_spec(args), args.out)
    return {"out": args.out, "ball": res["ball"], "dual_ball": res["dual_ball"]}


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="normlab", description="Finite-dimensional normed-space toolkit.")
    p.add_argument("--dump-lp", metavar="FILE", help="write every LP solved to FILE as JSON")
    p.add_argument("--problem", metavar="FILE",
                   help='one JSON document: a "task" tag plus the inputs of that subcommand')
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def leaf(parent, name, handler, *flags):
        q = parent.add_parser(name)
        q.set_defaults(handler=handler)
        for flag in flags:
            flag(q)
        return q

    def spec_flag(q):
        q.add_argument("--spec", "--norm", dest="spec", required=True, metavar="FILE")

    def file_flag(name, required=True):
        return lambda q: q.add_argument(f"--{name}", required=required, metavar="FILE")

    def seed_flag(q):
        q.add_argument("--seed", type=int, default=0)

    norm = sub.add_parser("norm").add_subparsers(dest="action", parser_class=_Parser)
    norm.required = True
    leaf(norm, "eval", cmd_norm_eval, spec_flag, file_flag("vector"))
    leaf(norm, "axioms", cmd_norm_axioms, spec_flag, seed_flag,
         lambda q: q.add_argument("--trials", type=int, default=1000))

    dual = sub.add_parser("dual").add_subparsers(dest="action", parser_class=_Parser)
    dual.required = True
    leaf(dual, "norm", cmd_dual_norm, spec_flag, file_flag("functional"))
    leaf(dual, "polar", cmd_dual_polar, spec_flag)
    leaf(dual, "norming", cmd_dual_norming, spec_flag, file_flag("vector"))

    audit = lambda q: q.add_argument("--audit", type=int, default=32)  # noqa: E731
    opn = sub.add_parser("opnorm").add_subparsers(dest="action", parser_class=_Parser)
    opn.required = True
    leaf(opn, "l1v", cmd_opnorm_l1v, spec_flag, file_flag("map"), audit, seed_flag)
    leaf(opn, "vlinf", cmd_opnorm_vlinf, spec_flag, file_flag("map"), audit, seed_flag)

    leaf(sub, "extend", cmd_extend, spec_flag, file_flag("subspace"), file_flag("values"),
         lambda q: q.add_argument("--bound", type=float, default=None, metavar="L"))

    mea = sub.add_parser("measure").add_subparsers(dest="action", parser_class=_Parser)
    mea.required = True
    leaf(mea, "tv", cmd_measure_tv, file_flag("measure"))
    leaf(mea, "barycenter", cmd_measure_barycenter, file_flag("measure"))
    leaf(mea, "multiply", cmd_measure_multiply, file_flag("measure"), file_flag("function"))
    leaf(mea, "gap", cmd_measure_gap, file_flag("measure"), file_flag("other"), file_flag("tests"))
    leaf(mea, "nonneg", cmd_measure_nonneg, file_flag("measure"))
    leaf(mea, "integrate", cmd_measure_integrate, file_flag("measure"), file_flag("function"))
    leaf(mea, "dirac", cmd_measure_dirac, spec_flag, file_flag("vector"))

    ver = sub.add_parser("verify").add_subparsers(dest="action", parser_class=_Parser)
    ver.required = True
    leaf(ver, "run", cmd_verify_run, file_flag("config", required=False), seed_flag,
         file_flag("out", required=False),
         lambda q: q.add_argument("--trials", type=int, default=1000,
                                  help="trials per case for the built-in suite"),
         lambda q: q.add_argument("--timing", action="store_true",
                                  help="include wall times (breaks byte-identical reports)"))

    leaf(sub, "plot", cmd_plot, spec_flag, file_flag("out"))
    return p


# flags whose values are plain options rather than input documents
_OPTION_KEYS = {"bound", "seed", "trials", "audit", "out", "timing"}


def _problem_args(parser, path, dump_lp):
    data = io.load_json(path)
    if not isinstance(data, dict) or not isinstance(data.get("task"), str):
        raise MalformedInput('a problem file is an object with a string "task" tag')
    argv = ["--dump-lp", dump_lp] if dump_lp else []
    argv += data["task"].replace(".", " ").split()
    inline = {}
    for key, value in data.items():
        if key == "task":
            continue
        if key == "timing":
            if value is True:
                argv.append("--timing")
            continue
        argv.append(f"--{key}")
        if key in _OPTION_KEYS:
            argv.append(str(value))
        else:
            argv.append(f"<{key}>")
            inline["spec" if key == "norm" else key] = _Inline(value)
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        raise MalformedInput(f"problem file: {exc}") from None
    if args.command is None:
        raise MalformedInput("problem file: no task given")
    for dest, value in inline.items():
        setattr(args, dest, value)
    return args


def _emit(payload, stream=None):
    stream = stream or sys.stdout
    stream.write(io.dumps(payload) + "\n")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        _emit({"error": {"code": "MALFORMED_INPUT", "detail": str(exc)}})
        print(f"normlab: {exc}", file=sys.stderr)
        return 2
    try:
        if args.problem:
            args = _problem_args(parser, args.problem, args.dump_lp)
        elif args.command is None:
            raise MalformedInput("no subcommand given")
        if args.dump_lp:
            with record_lps() as log:
                out = args.handler(args)
            with open(args.dump_lp, "w", encoding="utf-8") as fh:
                fh.write(io.dumps(log) + "\n")
        else:
            out = args.handler(args)
    except MalformedInput as exc:
        _emit({"error": exc.to_dict()})
        print(f"normlab: {exc.detail}", file=sys.stderr)
        return 2
    except NormLabError as exc:
        _emit({"error": exc.to_dict()})
        print(f"normlab: {exc.detail}", file=sys.stderr)
        return 1
    code = 0
    if isinstance(out, tuple):
        out, code = out
    _emit(out)
    return code


if __name__ == "__main__":
    sys.exit(main())

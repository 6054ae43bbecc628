"""Command-line front end.

Loads channel documents, runs comparisons and lattice operations, and emits
JSON certificates (or CSV tables for grid-shaped payloads).  Exit status:
0 when the queried relation holds or the operation succeeded, 1 when the
relation does not hold, 2 on usage or validation errors (reported as a
one-line JSON object on standard error).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import dmc, lgc, noise, phase

__all__ = ["ChannelDocument", "load_document", "run", "main"]

_DMC_CONVENTIONS = [
    "decisions are deterministic: fixed enumeration order and Bland pivoting",
    "witnesses replay as: sum of weights * (input-degraded, output-degraded channel)",
]
_NOISE_CONVENTIONS = [noise.ORDER_CONVENTION]
_PHASE_CONVENTIONS = [
    "strict = cannot be undone by any further phase degradation",
    "a null (worst) channel is excluded from the strictness question",
]
_LGC_CONVENTIONS = [lgc.PADDING_CONVENTION]
_ENSEMBLE_CONVENTIONS = [
    lgc.PADDING_CONVENTION,
    "ensemble comparisons assume the two ensembles share a common copula",
]


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass(frozen=True)
class ChannelDocument:
    """One loaded channel file: payload plus optional metadata block."""

    kind: str
    payload: object
    name: str = ""
    description: str = ""


_LOADERS = {
    "dmc": dmc.from_json_dict,
    "kfunction": noise.from_json_dict,
    "torus": phase.from_json_dict,
    "lgc": lgc.from_json_dict,
    "lgc_ensemble": lgc.ensemble_from_json_dict,
}


def _read_json(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as handle:
        obj = json.load(handle)
    if not isinstance(obj, dict):
        raise ValueError(f"{path}: expected a JSON object")
    return obj


def load_document(path: str) -> ChannelDocument:
    """Load any supported channel document, dispatching on its type tag."""
    obj = _read_json(path)
    kind = obj.get("type")
    loader = _LOADERS.get(kind)
    if loader is None:
        raise ValueError(f"{path}: unknown document type {kind!r}")
    meta = obj.get("metadata", {}) if isinstance(obj.get("metadata"), dict) else {}
    return ChannelDocument(
        kind=kind,
        payload=loader(obj),
        name=str(meta.get("name", "")),
        description=str(meta.get("description", "")),
    )


def _load_typed(path: str, kind: str):
    document = load_document(path)
    if document.kind != kind:
        raise ValueError(f"{path}: expected a {kind!r} document, found {document.kind!r}")
    return document.payload


def _load_matrix(path: str) -> np.ndarray:
    obj = _read_json(path)
    if obj.get("type") not in (None, "matrix"):
        raise ValueError(f"{path}: expected a matrix document")
    return np.asarray(obj["matrix"], dtype=float)


def _metadata(command: str, parameters: dict, conventions: list[str]) -> dict:
    return {"command": command, "parameters": parameters, "conventions": conventions}


def _result_doc(command: str, parameters: dict, conventions: list[str], result: dict) -> dict:
    return {
        "type": "result",
        "command": command,
        "parameters": parameters,
        "result": result,
        "conventions": conventions,
    }


def _emit(args, document: dict, table) -> None:
    if getattr(args, "format", "json") == "csv":
        if table is None:
            raise UsageError("csv output is only available for grid or table results")
        text = "\n".join(",".join(_cell(v) for v in row) for row in table) + "\n"
    else:
        text = json.dumps(document, indent=2) + "\n"
    out = getattr(args, "out", None)
    if out:
        with open(out, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _cell(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def _seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return int(args.seed)
    env = os.environ.get("CHANORDER_SEED")
    return int(env) if env else 0


# ---------------------------------------------------------------------------
# dmc subcommands


def _cmd_dmc_check(args):
    better = _load_typed(args.better, "dmc")
    worse = _load_typed(args.worse, "dmc")
    decision = dmc.includes(better, worse, tolerance=args.tolerance, cap=args.cap)
    parameters = {"tolerance": args.tolerance, "cap": args.cap}
    if decision.included:
        result = {
            "included": True,
            "witness": dmc.witness_to_json_dict(decision.witness),
            "residual": decision.witness.residual,
        }
        return _result_doc("dmc check", parameters, _DMC_CONVENTIONS, result), 0, None
    result = {
        "included": False,
        "separator": decision.separator.tolist(),
        "margin": decision.margin,
    }
    return _result_doc("dmc check", parameters, _DMC_CONVENTIONS, result), 1, None


def _cmd_dmc_equiv(args):
    a = _load_typed(args.a, "dmc")
    b = _load_typed(args.b, "dmc")
    verdict = dmc.equivalent(a, b, tolerance=args.tolerance, cap=args.cap)
    parameters = {"tolerance": args.tolerance, "cap": args.cap}
    doc = _result_doc("dmc equiv", parameters, _DMC_CONVENTIONS, {"equivalent": verdict})
    return doc, 0 if verdict else 1, None


def _cmd_dmc_degrade(args):
    channel = _load_typed(args.channel, "dmc")
    witness = dmc.witness_from_json_dict(_read_json(args.witness))
    degraded = dmc.degrade(channel, witness.pairs, witness.weights, n_outputs=args.n_outputs)
    parameters = {"n_outputs": degraded.n_outputs}
    doc = dmc.to_json_dict(degraded)
    doc["metadata"] = _metadata("dmc degrade", parameters, _DMC_CONVENTIONS)
    return doc, 0, degraded.entries.tolist()


def _cmd_dmc_error_prob(args):
    channel = _load_typed(args.channel, "dmc")
    value = dmc.best_error_probability(channel, args.messages, args.block_length, cap=args.cap)
    parameters = {"messages": args.messages, "block_length": args.block_length, "cap": args.cap}
    doc = _result_doc("dmc error-prob", parameters, _DMC_CONVENTIONS, {"error_probability": value})
    return doc, 0, None


# ---------------------------------------------------------------------------
# noise subcommands


def _cmd_noise_check(args):
    better = _load_typed(args.better, "kfunction")
    worse = _load_typed(args.worse, "kfunction")
    outcome = noise.check_order(better, worse, tolerance=args.tolerance)
    holds = outcome.relation in (noise.Relation.SECOND_WORSE, noise.Relation.EQUAL)
    parameters = {"tolerance": args.tolerance}
    result = {
        "relation": outcome.relation.value,
        "max_violation": outcome.max_violation,
        "claim_holds": holds,
    }
    doc = _result_doc("noise check", parameters, _NOISE_CONVENTIONS, result)
    return doc, 0 if holds else 1, None


def _profile_table(profile: noise.MonotoneProfile):
    table = [["kind", "x", "value"]]
    table += [["density", float(u), float(d)] for u, d in zip(profile.grid, profile.density)]
    table += [["atom", float(loc), float(mass)] for loc, mass in profile.atoms]
    return table


def _cmd_noise_lattice(args, combine, command):
    a = _load_typed(args.first, "kfunction")
    b = _load_typed(args.second, "kfunction")
    result = combine(a, b)
    doc = noise.to_json_dict(result)
    doc["metadata"] = _metadata(command, {}, _NOISE_CONVENTIONS)
    return doc, 0, _profile_table(result)


def _cmd_noise_cf(args):
    profile = _load_typed(args.profile, "kfunction")
    values = []
    for zeta in args.zeta:
        value = noise.log_cf(profile, zeta)
        values.append({"zeta": zeta, "re": value.real, "im": value.imag})
    doc = _result_doc("noise cf", {}, _NOISE_CONVENTIONS, {"log_cf": values})
    return doc, 0, None


def _cmd_noise_variance(args):
    profile = _load_typed(args.profile, "kfunction")
    doc = _result_doc(
        "noise variance", {}, _NOISE_CONVENTIONS, {"variance": noise.variance(profile)}
    )
    return doc, 0, None


# ---------------------------------------------------------------------------
# phase subcommands


def _parse_family(spec: str):
    parts = spec.split(":")
    kind = parts[0].strip().lower()
    try:
        if kind in ("uniform", "u"):
            return phase.UniformPhase()
        if kind in ("point", "p"):
            return phase.PointPhase(float(parts[1]) if len(parts) > 1 else 0.0)
        if kind in ("wgauss", "wrapped_gaussian", "wg"):
            return phase.WrappedGaussian(float(parts[1]), float(parts[2]))
        if kind in ("wcauchy", "wrapped_cauchy", "wc"):
            return phase.WrappedCauchy(float(parts[1]), float(parts[2]))
    except (IndexError, ValueError) as exc:
        raise UsageError(f"malformed phase family {spec!r}: {exc}") from exc
    raise UsageError(
        f"unknown phase family {spec!r}; use uniform, point:ANGLE, "
        "wgauss:MEAN:SIGMA2 or wcauchy:MEAN:GAMMA"
    )


def _spectrum_table(spectrum: phase.TorusSpectrum):
    table = [["m", "n", "re", "im"]]
    order = spectrum.order
    for i in range(2 * order + 1):
        for j in range(2 * order + 1):
            c = spectrum.coeffs[i, j]
            table.append([i - order, j - order, float(c.real), float(c.imag)])
    return table


def _phase_doc(spectrum, command, parameters):
    doc = phase.to_json_dict(spectrum)
    doc["metadata"] = _metadata(command, parameters, _PHASE_CONVENTIONS)
    return doc, 0, _spectrum_table(spectrum)


def _cmd_phase_build(args):
    h = phase.from_wrapped(_parse_family(args.h_phase), args.order)
    v = phase.from_wrapped(_parse_family(args.v_phase), args.order)
    spectrum = phase.product_channel(h, v)
    parameters = {"h_phase": args.h_phase, "v_phase": args.v_phase, "order": args.order}
    return _phase_doc(spectrum, "phase build", parameters)


def _cmd_phase_degrade(args):
    channel = _load_typed(args.channel, "torus")
    degradation = _load_typed(args.degradation, "torus")
    degraded = phase.degrade(channel, degradation)
    return _phase_doc(degraded, "phase degrade", {})


def _cmd_phase_strict(args):
    channel = _load_typed(args.channel, "torus")
    degradation = _load_typed(args.degradation, "torus")
    outcome = phase.is_strict(channel, degradation, epsilon=args.epsilon)
    result = {"classification": outcome.kind.value}
    if outcome.witness is not None:
        result["witness"] = list(outcome.witness)
    doc = _result_doc("phase strict", {"epsilon": args.epsilon}, _PHASE_CONVENTIONS, result)
    # The queried relation is "the degradation can be undone"; a strict
    # degradation means the relation fails.
    return doc, 1 if outcome.kind is phase.Strictness.STRICT else 0, None


def _cmd_phase_extremal(args):
    if args.kind == "worst":
        spectrum = phase.worst_channel(args.order)
    elif args.kind == "output-uniform":
        spectrum = phase.output_uniformizing_degradation(args.order)
    elif args.kind == "input-uniform":
        spectrum = phase.input_uniformizing_degradation(args.order)
    else:
        raise UsageError(f"unknown extremal kind {args.kind!r}")
    return _phase_doc(spectrum, "phase extremal", {"kind": args.kind, "order": args.order})


# ---------------------------------------------------------------------------
# lgc subcommands


def _cmd_lgc_canon(args):
    channel = _load_typed(args.channel, "lgc")
    spectrum = lgc.canonicalize(channel)
    doc = _result_doc("lgc canon", {}, _LGC_CONVENTIONS, {"spectrum": spectrum.values.tolist()})
    return doc, 0, [list(spectrum.values)]


def _cmd_lgc_check(args):
    better = _load_typed(args.better, "lgc")
    worse = _load_typed(args.worse, "lgc")
    decision = lgc.includes(better, worse, tolerance=args.tolerance)
    result = {"included": decision.included}
    if decision.violating_index is not None:
        result["violating_index"] = decision.violating_index
    doc = _result_doc("lgc check", {"tolerance": args.tolerance}, _LGC_CONVENTIONS, result)
    return doc, 0 if decision.included else 1, None


def _cmd_lgc_lattice(args, combine, command):
    a = lgc.canonicalize(_load_typed(args.first, "lgc"))
    b = lgc.canonicalize(_load_typed(args.second, "lgc"))
    spectrum = combine(a, b)
    doc = _result_doc(command, {}, _LGC_CONVENTIONS, {"spectrum": spectrum.values.tolist()})
    return doc, 0, [list(spectrum.values)]


def _cmd_lgc_verify_equiv(args):
    channel = _load_typed(args.channel, "lgc")
    report = lgc.verify_equivalence_transform(
        channel, _load_matrix(args.b_matrix), _load_matrix(args.c_matrix), tolerance=args.tolerance
    )
    result = {"equivalent": report.equivalent}
    if report.condition is not None:
        result["condition"] = report.condition
    if report.max_deviation is not None:
        result["max_deviation"] = report.max_deviation
    doc = _result_doc("lgc verify-equiv", {"tolerance": args.tolerance}, _LGC_CONVENTIONS, result)
    return doc, 0 if report.equivalent else 1, None


def _cmd_lgc_sample_haar(args):
    seed = _seed(args)
    matrix = lgc.sample_haar_orthogonal(args.n, seed)
    doc = _result_doc(
        "lgc sample-haar", {"n": args.n, "seed": seed}, _LGC_CONVENTIONS, {"matrix": matrix.tolist()}
    )
    return doc, 0, matrix.tolist()


def _cmd_lgc_ensemble_order(args):
    a = _load_typed(args.a, "lgc_ensemble")
    b = _load_typed(args.b, "lgc_ensemble")
    decision = lgc.ensemble_order(a, b, n_grid=args.n_grid)
    parameters = {"n_grid": args.n_grid}
    result = {
        "ordered": decision.ordered,
        "direction": decision.direction,
        "max_margin": decision.max_margin,
        "max_violation": decision.max_violation,
        "band": decision.band,
    }
    doc = _result_doc("lgc ensemble-order", parameters, _ENSEMBLE_CONVENTIONS, result)
    return doc, 0 if decision.ordered else 1, None


# ---------------------------------------------------------------------------
# parser assembly


def _add_common(parser, tolerance=False, cap=False, out=True, seed=False, order=False):
    if tolerance:
        parser.add_argument("--tolerance", type=float, default=1e-9)
    if cap:
        parser.add_argument("--cap", type=int, default=dmc.ENUMERATION_CAP)
    if seed:
        parser.add_argument("--seed", type=int, default=None)
    if order:
        parser.add_argument("--order", type=int, default=32)
    if out:
        parser.add_argument("--out", default=None, help="write the document to a file")
        parser.add_argument("--format", choices=("json", "csv"), default="json")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="chanorder", description=__doc__)
    groups = parser.add_subparsers(dest="group")

    group = groups.add_parser("dmc", help="discrete memoryless channels")
    sub = group.add_subparsers(dest="command")
    p = sub.add_parser("check")
    p.add_argument("--better", required=True)
    p.add_argument("--worse", required=True)
    _add_common(p, tolerance=True, cap=True)
    p.set_defaults(handler=_cmd_dmc_check)
    p = sub.add_parser("equiv")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    _add_common(p, tolerance=True, cap=True)
    p.set_defaults(handler=_cmd_dmc_equiv)
    p = sub.add_parser("degrade")
    p.add_argument("--channel", required=True)
    p.add_argument("--witness", required=True)
    p.add_argument("--n-outputs", type=int, default=None)
    _add_common(p)
    p.set_defaults(handler=_cmd_dmc_degrade)
    p = sub.add_parser("error-prob")
    p.add_argument("--channel", required=True)
    p.add_argument("--messages", type=int, required=True)
    p.add_argument("--block-length", type=int, required=True)
    _add_common(p, cap=True)
    p.set_defaults(handler=_cmd_dmc_error_prob)

    group = groups.add_parser("noise", help="additive infinitely divisible noise channels")
    sub = group.add_subparsers(dest="command")
    p = sub.add_parser("check")
    p.add_argument("--better", required=True)
    p.add_argument("--worse", required=True)
    _add_common(p, tolerance=True)
    p.set_defaults(handler=_cmd_noise_check)
    for name, combine in (("lub", noise.lub), ("glb", noise.glb)):
        p = sub.add_parser(name)
        p.add_argument("first")
        p.add_argument("second")
        _add_common(p)
        p.set_defaults(handler=lambda a, c=combine, n=name: _cmd_noise_lattice(a, c, f"noise {n}"))
    p = sub.add_parser("cf")
    p.add_argument("--profile", required=True)
    p.add_argument("--zeta", type=float, action="append", required=True)
    _add_common(p)
    p.set_defaults(handler=_cmd_noise_cf)
    p = sub.add_parser("variance")
    p.add_argument("--profile", required=True)
    _add_common(p)
    p.set_defaults(handler=_cmd_noise_variance)

    group = groups.add_parser("phase", help="phase-degraded torus channels")
    sub = group.add_subparsers(dest="command")
    p = sub.add_parser("build")
    p.add_argument("--h-phase", required=True, help="gain phase family, e.g. wgauss:0:1")
    p.add_argument("--v-phase", required=True, help="noise phase family, e.g. uniform")
    _add_common(p, order=True)
    p.set_defaults(handler=_cmd_phase_build)
    p = sub.add_parser("degrade")
    p.add_argument("--channel", required=True)
    p.add_argument("--degradation", required=True)
    _add_common(p)
    p.set_defaults(handler=_cmd_phase_degrade)
    p = sub.add_parser("strict")
    p.add_argument("--channel", required=True)
    p.add_argument("--degradation", required=True)
    p.add_argument("--epsilon", type=float, default=1e-9)
    _add_common(p)
    p.set_defaults(handler=_cmd_phase_strict)
    p = sub.add_parser("extremal")
    p.add_argument("--kind", choices=("worst", "output-uniform", "input-uniform"), required=True)
    _add_common(p, order=True)
    p.set_defaults(handler=_cmd_phase_extremal)

    group = groups.add_parser("lgc", help="linear Gaussian channels")
    sub = group.add_subparsers(dest="command")
    p = sub.add_parser("canon")
    p.add_argument("--channel", required=True)
    _add_common(p)
    p.set_defaults(handler=_cmd_lgc_canon)
    p = sub.add_parser("check")
    p.add_argument("--better", required=True)
    p.add_argument("--worse", required=True)
    _add_common(p, tolerance=True)
    p.set_defaults(handler=_cmd_lgc_check)
    for name, combine in (("lub", lgc.lub), ("glb", lgc.glb)):
        p = sub.add_parser(name)
        p.add_argument("first")
        p.add_argument("second")
        _add_common(p)
        p.set_defaults(handler=lambda a, c=combine, n=name: _cmd_lgc_lattice(a, c, f"lgc {n}"))
    p = sub.add_parser("verify-equiv")
    p.add_argument("--channel", required=True)
    p.add_argument("--b-matrix", required=True)
    p.add_argument("--c-matrix", required=True)
    _add_common(p, tolerance=True)
    p.set_defaults(handler=_cmd_lgc_verify_equiv)
    p = sub.add_parser("sample-haar")
    p.add_argument("--n", type=int, required=True)
    _add_common(p, seed=True)
    p.set_defaults(handler=_cmd_lgc_sample_haar)
    p = sub.add_parser("ensemble-order")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--n-grid", type=int, default=101)
    _add_common(p)
    p.set_defaults(handler=_cmd_lgc_ensemble_order)

    return parser


def _report_error(exc: Exception) -> None:
    payload = {"error": {"type": type(exc).__name__, "message": str(exc)}}
    sys.stderr.write(json.dumps(payload) + "\n")


def run(argv=None) -> int:
    """Parse arguments, execute one subcommand, and return the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not hasattr(args, "handler"):
            raise UsageError("a subcommand is required (see --help)")
        document, code, table = args.handler(args)
        _emit(args, document, table)
        return code
    except UsageError as exc:
        _report_error(exc)
        return 2
    except (ValueError, KeyError, TypeError, OSError, json.JSONDecodeError) as exc:
        _report_error(exc)
        return 2


def main(argv=None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())

"""JSON command line front end.

Commands: analyze, scan, verify, gen-state. Every command reads JSON (file
or stdin) and writes one JSON document to stdout; failures put a diagnostic
JSON object on stderr. Exit codes: 0 success, 1 parse error, 2 invalid
state, 3 no crossing, 4 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

from .bounds import SCHEMA_VERSION, analyze
from .linalg import ValidationError
from .selfcheck import run_verification
from .states import RNG_NAME, StateSpec, make_state, threshold_scan
from .tensors import IMAG_TOL, all_tensors

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_INVALID_STATE = 2
EXIT_NO_CROSSING = 3
EXIT_VERIFY_FAILED = 4

TOL_RANGE = (1e-14, 1e-4)
TOL_NAMES = ("hermiticity", "trace", "positivity", "tensor_reality")

DEFAULT_VALIDATION_TOLS = {"hermiticity": 1e-10, "trace": 1e-10,
                           "positivity": 1e-10}


class RequestError(ValueError):
    """The request itself is malformed (unparseable or wrong shape)."""


class _Float17Encoder(json.JSONEncoder):
    """Emit floats with 17 significant digits so doubles round-trip."""

    def iterencode(self, o, _one_shot=False):
        markers = {} if self.check_circular else None

        def floatstr(x, _repr=None, _inf=float("inf")):
            if x != x:
                return "NaN"
            if x == _inf:
                return "Infinity"
            if x == -_inf:
                return "-Infinity"
            return format(x, ".17g")

        make = json.encoder._make_iterencode(
            markers, self.default, json.encoder.encode_basestring_ascii,
            self.indent, floatstr, self.key_separator, self.item_separator,
            self.sort_keys, self.skipkeys, _one_shot)
        return make(o, 0)


def _emit(doc, stream=None):
    stream = stream or sys.stdout
    stream.write(json.dumps(doc, cls=_Float17Encoder, indent=2) + "\n")


def _fail(code, error, **extra):
    _emit({"error": error, **extra}, sys.stderr)
    return code


def _read_json(path):
    try:
        if path in (None, "-"):
            text = sys.stdin.read()
        else:
            with open(path, "r", encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        raise RequestError(f"cannot read input: {exc}") from exc
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise RequestError(f"invalid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise RequestError("top-level JSON must be an object")
    return payload


def _check_tolerances(tols):
    if not isinstance(tols, dict):
        raise RequestError("tolerances must be an object")
    lo, hi = TOL_RANGE
    for name, value in tols.items():
        if name not in TOL_NAMES:
            raise RequestError(f"unknown tolerance {name!r}; "
                               f"expected one of {', '.join(TOL_NAMES)}")
        if not isinstance(value, (int, float)) or not lo <= float(value) <= hi:
            raise RequestError(f"tolerance {name} must lie in [{lo:g}, {hi:g}]")
    return {k: float(v) for k, v in tols.items()}


def _parse_request(payload):
    """Split an analysis request into (StateSpec payload, options)."""
    if "state" in payload:
        spec_payload = payload["state"]
        options = payload.get("options", {})
    else:
        options = payload.pop("options", {}) if "options" in payload else {}
        spec_payload = payload
    if not isinstance(options, dict):
        raise RequestError("options must be an object")
    unknown = set(options) - {"samples_for_roof", "emit_tensors", "tolerances"}
    if unknown:
        raise RequestError(f"unknown options: {', '.join(sorted(unknown))}")
    options = dict(options)
    options["tolerances"] = _check_tolerances(options.get("tolerances", {}))
    if not isinstance(spec_payload, dict) or "kind" not in spec_payload:
        raise RequestError("state spec needs a 'kind' field")
    return spec_payload, options


def cmd_analyze(args) -> int:
    spec_payload, options = _parse_request(_read_json(args.input))
    spec = StateSpec.from_dict(spec_payload)
    if args.seed is not None:
        spec = replace(spec, seed=args.seed)
    tols = options["tolerances"]
    if args.tol is not None:
        lo, hi = TOL_RANGE
        if not lo <= args.tol <= hi:
            raise RequestError(f"--tol must lie in [{lo:g}, {hi:g}]")
        tols = {name: args.tol for name in TOL_NAMES}
    samples = args.samples if args.samples is not None \
        else int(options.get("samples_for_roof", 0))
    if samples < 0:
        raise RequestError("samples_for_roof must be nonnegative")
    emit_tensors = bool(args.emit_tensors or options.get("emit_tensors", False))

    validation_tols = {k: v for k, v in tols.items() if k != "tensor_reality"}
    imag_tol = tols.get("tensor_reality", IMAG_TOL)
    rho = make_state(spec, tolerances=validation_tols)
    report = analyze(rho, samples_for_roof=samples, seed=spec.seed or 0,
                     imag_tol=imag_tol)
    doc = report.as_dict()
    doc["tolerances"].update({**DEFAULT_VALIDATION_TOLS, **validation_tols})
    if emit_tensors:
        doc["tensors"] = all_tensors(rho, imag_tol=imag_tol).as_payload()
    _emit(doc)
    return EXIT_OK


def cmd_scan(args) -> int:
    payload = {"kind": "ghz_noise"} if args.input is None else _read_json(args.input)
    if "kind" not in payload:
        raise RequestError("scan spec needs a 'kind' field")
    base = StateSpec.from_dict(payload)
    if base.kind not in ("ghz_noise", "ghz_noise_general"):
        raise RequestError("scan expects a noise family kind "
                           "(ghz_noise or ghz_noise_general)")
    if args.predicate == "gme":
        if base.ctx.n_parties < 3:
            raise RequestError("the gme predicate needs at least three parties")
        predicate = lambda rep: rep.verdict == "genuine-multipartite-entangled"
    else:
        predicate = lambda rep: rep.concurrence_lower > 0.0
    tol = args.tol if args.tol is not None else 1e-5
    if tol <= 0:
        raise RequestError("--tol must be positive")

    result = threshold_scan(lambda x: base.with_params(x=x), predicate, tol)
    if result.no_crossing:
        return _fail(EXIT_NO_CROSSING, "no-crossing", reason=result.reason,
                     predicate=args.predicate, crossing_x=result.crossing_x)
    _emit({
        "schema_version": SCHEMA_VERSION,
        "crossing_x": result.crossing_x,
        "predicate": args.predicate,
        "tol": result.tol,
        "iterations": result.iterations,
        "rng": RNG_NAME,
    })
    return EXIT_OK


def _int_list(text):
    try:
        return tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise RequestError(f"expected a comma-separated integer list, got {text!r}") \
            from exc


def cmd_verify(args) -> int:
    try:
        summary = run_verification(
            ns=_int_list(args.ns), ds=_int_list(args.ds),
            n_states=args.n_random, seed=args.seed,
            roof_samples=args.samples if args.samples is not None else 40)
    except ValueError as exc:
        if isinstance(exc, RequestError):
            raise
        raise RequestError(str(exc)) from exc
    _emit(summary)
    if not summary["all_passed"]:
        failing = {name: summary["suites"][name]["max_residual"]
                   for name in summary["failures"]}
        return _fail(EXIT_VERIFY_FAILED, "verification-failure", failures=failing)
    return EXIT_OK


def cmd_gen_state(args) -> int:
    payload = _read_json(args.input)
    if "kind" not in payload:
        raise RequestError("state spec needs a 'kind' field")
    spec = StateSpec.from_dict(payload)
    if args.seed is not None:
        spec = replace(spec, seed=args.seed)
    rho = make_state(spec)
    matrix = [[[float(z.real), float(z.imag)] for z in row] for row in rho.mat]
    _emit({
        "schema_version": SCHEMA_VERSION,
        "kind": "dense",
        "n_parties": spec.ctx.n_parties,
        "local_dim": spec.ctx.local_dim,
        "params": {"matrix": matrix},
        "seed": spec.seed,
        "source_kind": spec.kind,
    })
    return EXIT_OK


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="blochbounds",
        description="Correlation-tensor entanglement bounds, JSON in and out.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="bound one state and report a verdict")
    p.add_argument("--input", default="-", help="request JSON file, - for stdin")
    p.add_argument("--seed", type=int, default=None,
                   help="override the state's seed")
    p.add_argument("--samples", type=int, default=None,
                   help="convex-roof samples (0 skips the estimate)")
    p.add_argument("--tol", type=float, default=None,
                   help="override every validation tolerance at once")
    p.add_argument("--emit-tensors", action="store_true",
                   help="append the full sector payload to the report")
    p.set_defaults(handler=cmd_analyze)

    p = sub.add_parser("scan", help="bisect a noise family for a crossing")
    p.add_argument("--input", default=None,
                   help="family spec JSON (default: three-qubit ghz_noise)")
    p.add_argument("--predicate", choices=("gme", "entangled"), required=True)
    p.add_argument("--tol", type=float, default=None,
                   help="bisection width, default 1e-5")
    p.set_defaults(handler=cmd_scan)

    p = sub.add_parser("verify", help="run the self-check suites")
    p.add_argument("--ns", default="2,3", help="party counts, comma-separated")
    p.add_argument("--ds", default="2", help="local dimensions, comma-separated")
    p.add_argument("--n-random", type=int, default=50,
                   help="random states per suite and combination")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=None,
                   help="convex-roof samples per sandwich check, default 40")
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("gen-state", help="resolve a spec to a dense matrix")
    p.add_argument("--input", default="-", help="state spec JSON, - for stdin")
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(handler=cmd_gen_state)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except RequestError as exc:
        return _fail(EXIT_PARSE, "parse", message=str(exc))
    except ValidationError as exc:
        return _fail(EXIT_INVALID_STATE, "invalid-state", **exc.as_dict())
    except ValueError as exc:
        return _fail(EXIT_INVALID_STATE, "invalid-state", message=str(exc))


def entry_point():
    sys.exit(main())


if __name__ == "__main__":
    entry_point()

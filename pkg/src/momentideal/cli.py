"""Command-line interface.

One subcommand per workflow; inputs and outputs are JSON (CSV for bench).
Exit codes: 0 success, 1 domain failure (uncertified, no decomposition,
decoding failure, ...) with a machine-readable error object, 2 usage or
input-format errors.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import apps, bench
from .border import EmptySupport, MonomialOrder, NotCertified, border_basis, mult_matrices
from .decomp import (
    Decomposition,
    DefectiveEigenvalue,
    InconsistentSystem,
    IrrationalSpectrum,
    RetriesExhausted,
    SingularSystem,
    VerificationFailed,
    decompose,
)
from .fields import DEFAULT_PRIME, FieldError, FieldSpec, ParseError
from .moments import MomentSequence, SupportError

DOMAIN_ERRORS = (
    NotCertified,
    EmptySupport,
    SupportError,
    IrrationalSpectrum,
    DefectiveEigenvalue,
    RetriesExhausted,
    VerificationFailed,
    SingularSystem,
    InconsistentSystem,
    apps.NotAPower,
    apps.DecodingFailure,
    bench.BenchFailure,
)


class UsageError(Exception):
    pass


def _read_json(path: str | None):
    try:
        if path is None or path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read input: {exc}") from exc


def _write(text: str, path: str | None):
    if path is None or path == "-":
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _write_json(obj, path: str | None):
    _write(json.dumps(obj, indent=2), path)


def _parse_field(text: str) -> FieldSpec:
    if text == "rational":
        return FieldSpec.rational()
    if text.startswith("prime:"):
        return FieldSpec.prime(int(text.split(":", 1)[1]))
    if text == "prime":
        return FieldSpec.prime(DEFAULT_PRIME)
    raise UsageError(f"bad field {text!r}; use 'rational' or 'prime:P'")


def _order_from_args(args) -> MonomialOrder:
    return MonomialOrder(args.order)


def _sequence_from_input(args) -> MomentSequence:
    obj = _read_json(args.input)
    try:
        return MomentSequence.from_json(obj)
    except (KeyError, ValueError, FieldError) as exc:
        raise UsageError(f"bad moment-sequence input: {exc}") from exc


def _decomposition_pipeline(sigma: MomentSequence, order: MonomialOrder, seed: int) -> Decomposition:
    res = border_basis(sigma, order)
    if not res.certified:
        raise NotCertified(res.diagnostic)
    tables = mult_matrices(sigma, res)
    return decompose(sigma, res, tables, seed=seed)


def cmd_borderbasis(args) -> int:
    sigma = _sequence_from_input(args)
    res = border_basis(sigma, _order_from_args(args))
    _write_json(res.to_json(), args.output)
    return 0


def cmd_decompose(args) -> int:
    sigma = _sequence_from_input(args)
    dec = _decomposition_pipeline(sigma, _order_from_args(args), args.seed)
    _write_json(dec.to_json(), args.output)
    return 0


def cmd_prony(args) -> int:
    sigma = _sequence_from_input(args)
    dec = apps.prony_grid(sigma, _order_from_args(args), seed=args.seed)
    _write_json(dec.to_json(), args.output)
    return 0


def cmd_interpolate(args) -> int:
    obj = _read_json(args.input)
    try:
        field = FieldSpec.from_json(obj.get("field", {"type": "rational"}))
        zeta = [int(z) for z in obj["zeta"]]
        if "moments" in obj:
            sigma = MomentSequence.from_json(obj)
        else:
            degree = args.degree if args.degree is not None else int(obj["degree"])
            terms = [
                apps.SparseTerm(field.parse(str(t["weight"])), tuple(t["exponent"]))
                for t in obj["terms"]
            ]
            sigma = apps.sample_sparse_poly(terms, zeta, degree, field, len(zeta))
    except (KeyError, ValueError, FieldError) as exc:
        raise UsageError(f"bad interpolation input: {exc}") from exc
    recovered = apps.sparse_interpolate(sigma, zeta, seed=args.seed)
    out = {
        "terms": [
            {"weight": sigma.field.format(t.weight), "exponent": list(t.exponent)}
            for t in recovered
        ]
    }
    _write_json(out, args.output)
    return 0


def cmd_tensor(args) -> int:
    obj = _read_json(args.input)
    try:
        tensor = apps.SymmetricTensor.from_json(obj)
    except (KeyError, ValueError, FieldError) as exc:
        raise UsageError(f"bad tensor input: {exc}") from exc
    dec = apps.tensor_decompose(tensor, seed=args.seed)
    _write_json(dec.to_json(), args.output)
    return 0


def cmd_decode(args) -> int:
    obj = _read_json(args.input)
    try:
        code = apps.CodeSpec.from_json(obj)
        word = [code.field.parse(w.strip()) for w in args.word.split(",")]
    except (KeyError, ValueError, FieldError) as exc:
        raise UsageError(f"bad code input: {exc}") from exc
    result = apps.decode(code, word)
    _write_json(result.to_json(code.field), args.output)
    return 0


def cmd_vanishing(args) -> int:
    obj = _read_json(args.input)
    try:
        field = FieldSpec.from_json(obj["field"])
        points = [tuple(field.parse(str(x)) for x in pt) for pt in obj["points"]]
        weights = None
        if "weights" in obj:
            weights = [field.parse(str(w)) for w in obj["weights"]]
        degree = args.degree if args.degree is not None else int(obj["degree"])
    except (KeyError, ValueError, FieldError) as exc:
        raise UsageError(f"bad points input: {exc}") from exc
    k, interpolants = apps.vanishing_ideal(points, degree, field, weights)
    out = {
        "field": field.to_json(),
        "nvars": len(points[0]),
        "k": [poly.to_json() for poly in k],
        "interpolants": [poly.to_json() for poly in interpolants],
    }
    _write_json(out, args.output)
    return 0


def cmd_bench(args) -> int:
    field = _parse_field(args.field)
    if not field.is_prime_field:
        raise UsageError("bench runs over a prime field")
    config = bench.BenchConfig(
        field=field,
        nvars=tuple(int(x) for x in args.nvars.split(",")),
        points=tuple(int(x) for x in args.points.split(",")),
        degree=args.degree,
        seed=args.seed,
        repetitions=args.repetitions,
        parallel_trials=args.parallel_trials,
    )
    rows = bench.run_bench(config)
    _write(bench.rows_to_csv(rows), args.csv or args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="momentideal",
        description="Border bases and decompositions of truncated moment sequences",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text, **extra):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--input", help="input JSON file (default: stdin)")
        p.add_argument("--output", help="output file (default: stdout)")
        p.add_argument("--order", choices=["deglex", "degrevlex"], default="deglex")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--field", default=f"prime:{DEFAULT_PRIME}")
        p.add_argument("--degree", type=int, default=None)
        p.set_defaults(fn=fn)
        return p

    add("borderbasis", cmd_borderbasis, "border basis of a moment sequence")
    add("decompose", cmd_decompose, "points and weights of a moment sequence")
    add("prony", cmd_prony, "exponential-sum decomposition of grid samples")
    add("interpolate", cmd_interpolate, "sparse interpolation from power samples")
    add("tensor", cmd_tensor, "symmetric tensor decomposition")
    decode_p = add("decode", cmd_decode, "syndrome decoding of an evaluation code")
    decode_p.add_argument("--word", required=True, help="received word, comma-separated")
    add("vanishing", cmd_vanishing, "vanishing ideal and interpolants of points")
    bench_p = add("bench", cmd_bench, "scaling benchmark over a prime field")
    bench_p.add_argument("--nvars", default="2")
    bench_p.add_argument("--points", default="50,100,200")
    bench_p.add_argument("--repetitions", type=int, default=3)
    bench_p.add_argument("--csv", help="CSV output path (overrides --output)")
    bench_p.add_argument("--parallel-trials", action="store_true")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DOMAIN_ERRORS as exc:
        _write_json({"error": {"type": type(exc).__name__, "message": str(exc)}}, args.output)
        return 1


if __name__ == "__main__":
    sys.exit(main())

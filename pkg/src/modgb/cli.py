"""Command line interface: ``modgb compute | gen | check``.

Exit codes: 0 success, 1 rejected basis, 2 input error, 3 resource exhaustion.
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import List, Optional

from . import systems, verify
from .driver import PrimeSupplyExhausted, RunConfig, integer_form, modular_gbasis
from .ideal import ParseError, parse_ideal, print_basis
from .monomial import DegreeOverflow, TooManyVariables
from .reconstruct import candidate_from_basis

EXIT_OK, EXIT_REJECTED, EXIT_INPUT, EXIT_RESOURCES = 0, 1, 2, 3


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _write(text: str, path: Optional[str]) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _compute(args) -> int:
    ideal = parse_ideal(_read(args.file))
    if args.certify:
        config = RunConfig(epsilon=0.0, check_mode=args.certify)
    else:
        eps = 1e-7 if args.epsilon is None else args.epsilon
        mode = verify.PROBABILISTIC if eps > 0 else verify.INTEGER
        config = RunConfig(epsilon=eps, check_mode=mode)
    config.prime_bits = args.prime_bits
    config.workers = args.threads
    config.verbose = args.stats
    basis, report, stats = modular_gbasis(ideal, config)
    if args.integer:
        basis = integer_form(basis)
    _write(print_basis(basis, ideal.variables), args.output)
    if args.stats:
        print(stats.summary(), file=sys.stderr)
        print(f"check: {report.mode} -> {report.result}"
              + (f" (bound {float(report.bound):.3g})" if report.bound is not None else ""),
              file=sys.stderr)
    return EXIT_OK if report.accepted else EXIT_REJECTED


def _gen(args) -> int:
    ideal = systems.by_name(args.system, args.n)
    _write(print_basis(ideal.generators, ideal.variables), args.output)
    return EXIT_OK


def _check(args) -> int:
    basis_spec = parse_ideal(_read(args.basis))
    ideal = parse_ideal(_read(args.ideal))
    if basis_spec.variables != ideal.variables:
        raise ParseError("basis and ideal files declare different variables")
    basis = [f for f in basis_spec.generators if f]
    basis.sort(key=lambda f: f.lm, reverse=True)
    cand = candidate_from_basis(basis)
    report = verify.certify(ideal.integer_generators(), cand, args.mode, args.epsilon)
    print(f"{report.result}")
    if report.witness is not None:
        print(f"witness: {report.witness}", file=sys.stderr)
    return EXIT_OK if report.accepted else EXIT_REJECTED


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="modgb", description="Groebner bases over Q by modular F4")
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compute", help="reduced degrevlex basis of an ideal file")
    c.add_argument("file")
    g = c.add_mutually_exclusive_group()
    g.add_argument("--epsilon", type=float, help="probabilistic check bound (0 = certify)")
    g.add_argument("--certify", choices=[verify.INTEGER, verify.MODULAR])
    c.add_argument("--prime-bits", type=int, choices=[24, 29, 31], default=29)
    c.add_argument("--threads", type=int, default=1)
    c.add_argument("--stats", action="store_true")
    c.add_argument("--integer", action="store_true", help="print primitive integer forms")
    c.add_argument("--output", "-o")
    c.set_defaults(func=_compute)

    s = sub.add_parser("gen", help="print a benchmark system")
    s.add_argument("system", choices=["cyclic", "katsura", "alea6"])
    s.add_argument("n", type=int, nargs="?", default=0)
    s.add_argument("--output", "-o")
    s.set_defaults(func=_gen)

    k = sub.add_parser("check", help="check a basis file against an ideal file")
    k.add_argument("basis")
    k.add_argument("ideal")
    k.add_argument("--mode", choices=list(verify.MODES), default=verify.INTEGER)
    k.add_argument("--epsilon", type=float, default=1e-7)
    k.set_defaults(func=_check)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (DegreeOverflow, TooManyVariables, ValueError, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (PrimeSupplyExhausted, MemoryError) as exc:
        print(f"resources exhausted: {exc}", file=sys.stderr)
        return EXIT_RESOURCES


if __name__ == "__main__":
    sys.exit(main())

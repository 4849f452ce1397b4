"""Command-line interface for polydyn."""

import argparse
import csv
import json
import logging
import sys
from pathlib import Path
from typing import Callable, Optional, Sequence

from polydyn import __version__
from polydyn.config import Config
from polydyn.core import orbit
from polydyn.core.poly import Poly, normalize_monic_centered
from polydyn.core.rings import PARAM, format_rational, param_coefficients, parse_rational
from polydyn.errors import ParseError, PolydynError
from polydyn.models import Angle, EntangleVerdict, RenderSpec
from polydyn.services import angles, dyngraph, entangle, green, pairs, render, symmetry, unicritical
from polydyn.services.bottcher import bottcher_power, bottcher_series
from polydyn.utils.logging import setup_logging

logger = logging.getLogger("polydyn")


def parse_complex(text: str) -> complex:
    """Parse ``x+yi`` (or ``x+yj``) into a complex number."""
    cleaned = text.strip().replace(" ", "").replace("i", "j")
    try:
        return complex(cleaned)
    except ValueError:
        raise ParseError(f"Not a complex number: {text!r}") from None


def parse_int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ParseError(f"Expected comma-separated integers, got {text!r}") from None


def parse_size(text: str) -> tuple[int, int]:
    """``WxH`` or a single ``N`` for a square."""
    parts = text.lower().split("x")
    try:
        if len(parts) == 1:
            return int(parts[0]), int(parts[0])
        if len(parts) == 2:
            return int(parts[0]), int(parts[1])
    except ValueError:
        pass
    raise ParseError(f"Expected WxH, got {text!r}")


def read_poly_arg(value: str) -> str:
    """Inline polynomial text, or the contents of ``@path`` or an existing file path."""
    if value.startswith("@"):
        path = Path(value[1:])
    elif ";" not in value and Path(value).is_file():
        path = Path(value)
    else:
        return value
    lines = [line.strip() for line in path.read_text().splitlines()]
    text = " ".join(line for line in lines if line and not line.startswith("#"))
    if not text:
        raise ParseError(f"No polynomial found in {path}")
    return text


def _emit_json(data) -> None:
    print(json.dumps(data, indent=2))


def _format_complex(z: complex) -> str:
    return f"{z.real:.17g}{z.imag:+.17g}i"


# Subcommands ----------------------------------------------------------------


def cmd_bottcher(args: argparse.Namespace, config: Config) -> int:
    P = Poly.parse(read_poly_arg(args.poly))
    series = bottcher_series(P, args.order)
    ring = series.ring
    data = {
        "ring": str(ring),
        "alpha": ring.format(series.alpha),
        "shift": ring.format(series.shift),
        "tail": [ring.format(c) for c in series.tail],
    }
    if args.power:
        hat = bottcher_power(P, args.power, args.order, series)
        data["hat"] = hat.hat.format()
        data["hat_tail"] = [ring.format(c) for c in hat.tail]
    if args.json:
        _emit_json(data)
        return 0
    print(f"ring = {data['ring']}")
    print(f"alpha = {data['alpha']}")
    print(f"shift = {data['shift']}")
    for j, value in enumerate(data["tail"], start=1):
        print(f"alpha_{j} = {value}")
    if args.power:
        print(f"hat_{args.power} = {data['hat']}")
    return 0


def cmd_green(args: argparse.Namespace, config: Config) -> int:
    P = Poly.parse(read_poly_arg(args.poly))
    z = parse_complex(args.at)
    result = green.green_value(P, z, args.n_max or config.green_budget)
    data = {
        "value": result.value,
        "error_bound": result.error_bound,
        "escape_step": result.escape_step,
    }
    if args.json:
        _emit_json(data)
    else:
        print(f"g = {result.value:.17g} +- {result.error_bound:.3g} (escape step {result.escape_step})")
    return 0


def cmd_orbit(args: argparse.Namespace, config: Config) -> int:
    P = Poly.parse(read_poly_arg(args.poly))
    max_steps = args.max_steps or config.max_steps
    if args.modulus:
        record = orbit.iterate_orbit_at_roots(
            P, PARAM.parse(args.point), PARAM.parse(args.modulus), max_steps, config.max_bits
        )
        fmt = PARAM.format
    else:
        record = orbit.iterate_orbit(P, parse_rational(args.point), max_steps, config.max_bits)
        fmt = format_rational
    data = {
        "kind": record.kind.value,
        "orbit": [fmt(z) for z in record.orbit],
        "tail": record.tail,
        "cycle": record.cycle,
        "escape_step": record.escape_step,
        "reason": record.reason,
    }
    if args.json:
        _emit_json(data)
        return 0
    if record.is_preperiodic:
        print(f"preperiodic: tail {record.tail}, cycle {record.cycle}")
    elif record.escape_step is not None:
        print(f"escaping at step {record.escape_step}")
    else:
        print(f"unknown ({record.reason})")
    for n, value in enumerate(data["orbit"]):
        print(f"z_{n} = {value}")
    return 0


def cmd_divisor(args: argparse.Namespace, config: Config) -> int:
    pair = pairs.DynPair.of(Poly.parse(read_poly_arg(args.family)), PARAM.parse(args.marked))
    q_max = args.q_max or config.q_max
    order = pairs.divisor_order(pair, q_max, config.max_bits)
    classification = pairs.classify_pair(pair, q_max, config.max_bits)
    data = {
        "status": order.status.value,
        "classification": classification.kind.value,
        "q": format_rational(order.q) if order.q is not None else None,
        "stabilized_at": order.stabilized_at,
        "degrees": order.witness_degrees,
    }
    if order.preperiodic is not None:
        data["preperiodic"] = list(order.preperiodic)
    if args.json:
        _emit_json(data)
        return 0
    print(f"q = {data['q'] if data['q'] is not None else 'unknown'}")
    print(f"classification: {data['classification']}")
    if order.stabilized_at is not None:
        print(f"stabilized at n = {order.stabilized_at}")
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["n", "degree"])
    for n, degree in enumerate(order.witness_degrees):
        writer.writerow([n, "-inf" if degree is None else degree])
    return 0


def cmd_symmetry(args: argparse.Namespace, config: Config) -> int:
    P = Poly.parse(read_poly_arg(args.poly))
    if not (P.is_monic() and P.is_centered()):
        P, _, _ = normalize_monic_centered(P)
        logger.info(f"Normalized to {P}")
    summary = symmetry.symmetry_summary(symmetry.symmetry_group(P))
    if args.decompose:
        summary["decomposition"] = [factor.format() for factor in symmetry.decompose(P)]
        summary["primitive"] = symmetry.is_primitive(P)
    if args.json:
        _emit_json(summary)
        return 0
    print(f"Sigma:  {summary['sigma']}")
    print(f"Sigma0: {summary['sigma0']}")
    print(f"Aut:    {summary['aut']}")
    print(f"mu = {summary['mu']}, m = {summary['m']}")
    if args.decompose:
        print("decomposition: " + " o ".join(f"({f})" for f in summary["decomposition"]))
        print(f"primitive: {summary['primitive']}")
    return 0


def cmd_tables(args: argparse.Namespace, config: Config) -> int:
    rows = symmetry.stratify(args.degree, seed=args.seed)
    with_primitive = args.degree == 4
    writer = csv.writer(sys.stdout, lineterminator="\n")
    header = ["range", "aut", "sigma", "sigma0", "complexity"]
    if with_primitive:
        header.append("primitive")
    writer.writerow(header)
    for row in rows:
        record = [
            row.label,
            row.symmetry.aut_order,
            row.symmetry.sigma_label(),
            row.symmetry.sigma0_label(),
            row.complexity,
        ]
        if with_primitive:
            record.append("yes" if row.primitive else "no")
        writer.writerow(record)
    return 0


def cmd_graph(args: argparse.Namespace, config: Config) -> int:
    P = Poly.parse(read_poly_arg(args.poly))
    G = dyngraph.build_graph(P, args.depth or config.graph_depth, config.max_bits)
    violations = dyngraph.validate_axioms(G)
    if violations:
        logger.warning(f"Axiom violations: {', '.join(violations)}")
    special = dyngraph.is_special(G) if args.special else None
    if args.json:
        data = dyngraph.graph_to_json(G)
        if special is not None:
            data["special"] = special
        if args.json == "-":
            _emit_json(data)
        else:
            out = Path(args.json)
            out.parent.mkdir(parents=True, exist_ok=True)
            out.write_text(json.dumps(data, indent=2) + "\n")
            logger.info(f"Wrote graph to {out}")
        return 0
    print(f"k = {G.k}, rho = {G.rho}, depth = {G.depth}, complete = {G.complete}")
    for vid in sorted(G.vertices, key=dyngraph.vertex_sort_key):
        v = G.vertices[vid]
        label = f"ray depth {v.depth}" if v.is_ray else v.value
        print(f"{vid:>10}  dpi={v.dpi}  {label:<16} -> {G.flow[vid]}  (g: {G.action[vid]})")
    marks = ", ".join(f"{i}: {vid}" for i, vid in sorted(G.marking.items()))
    print(f"marking: {marks}")
    print(f"violations: {', '.join(violations) if violations else 'none'}")
    if special is not None:
        print(f"special: {special}")
    return 0


def cmd_angles(args: argparse.Namespace, config: Config) -> int:
    if args.check:
        angle = Angle(parse_rational(args.check))
        preperiod, period = angles.md_orbit(angle, args.degree)
        print(f"({preperiod}, {period})")
        return 0
    if not args.periods or not args.branch_degrees:
        raise ValueError("--periods and --branch-degrees are required without --check")
    portrait = angles.build_portrait(
        args.degree, parse_int_list(args.periods), parse_int_list(args.branch_degrees)
    )
    if args.json:
        _emit_json({"degree": portrait.degree, "sets": [[str(a) for a in s] for s in portrait.sets]})
    else:
        print(angles.format_portrait(portrait))
    return 0


def cmd_count(args: argparse.Namespace, config: Config) -> int:
    if args.preperiod is not None:
        result = unicritical.pcf_count_preperiodic(args.degree, args.preperiod, args.period)
    else:
        result = unicritical.pcf_count_periodic(args.degree, args.period)
    print(result.count)
    return 0


def mset_report_to_json(report) -> dict:
    data = {
        "lambda": _format_complex(report.lam),
        "degree": report.degree,
        "verdict": report.verdict.value,
        "convention": report.convention,
        "samples": report.samples,
        "budget": report.budget,
        "heuristic": report.heuristic,
        "shortcut": report.shortcut,
        "expected_capacity": report.expected_capacity,
        "membership_candidates": report.membership_candidates,
        "witness": None,
    }
    if report.witness is not None:
        data["witness"] = {
            "t": _format_complex(report.witness.t),
            "kind": report.witness.kind,
            "grid_index": list(report.witness.grid_index),
            "details": report.witness.details,
        }
    return data


def cmd_mset(args: argparse.Namespace, config: Config) -> int:
    report = unicritical.mset_lambda_test(
        args.degree,
        parse_complex(args.lam),
        grid=args.grid or config.mset_grid,
        budget=args.budget or config.mset_budget,
        convention=args.convention,
    )
    _emit_json(mset_report_to_json(report))
    return 0


def cmd_render(args: argparse.Namespace, config: Config) -> int:
    width, height = parse_size(args.size)
    marked = PARAM.parse(args.marked)
    spec = RenderSpec(
        degree=args.degree,
        marked=tuple(param_coefficients(marked)),
        center=parse_complex(args.center),
        width=args.width,
        pixels_w=width,
        pixels_h=height,
        budget=args.budget or config.render_budget,
        palette=args.palette,
    )
    data = render.render(spec)
    render.write_ppm(Path(args.output), data)
    return 0


def cmd_entangle(args: argparse.Namespace, config: Config) -> int:
    pair_a = pairs.DynPair.parse(args.pair_a)
    pair_b = pairs.DynPair.parse(args.pair_b)
    caps = entangle.EntangleCaps(q_max=config.q_max, max_bits=config.max_bits)
    outcome = entangle.entangle_decide(pair_a, pair_b, caps)
    if args.json:
        _emit_json(entangle.outcome_summary(outcome))
        return 0
    if outcome.certified:
        c = outcome.certificate
        print("Certificate")
        print(f"  (n, m) = ({c.n}, {c.m}), (N, M) = ({c.N}, {c.M}), ell = {c.ell}, L = {c.L}, zeta = {c.zeta:+d}")
        print(f"  R = {c.R}")
    else:
        print(f"{outcome.verdict.value} at {outcome.stage.value}: {outcome.detail}")
        if outcome.verdict == EntangleVerdict.REFUTED:
            print("  not entangled (conditional on the characterization theorem)")
    return 0


# Parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polydyn",
        description="Exact and numerical tools for polynomial dynamics",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "-v", "--verbose",
        action="store_true",
        help="Enable verbose output (DEBUG level)",
    )
    parser.add_argument("--config", type=str, help="Path to a settings file (dotenv format)")
    parser.add_argument("--log-dir", type=str, help="Directory for a DEBUG log file")

    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("bottcher", help="Böttcher coefficients and polynomial parts")
    p.add_argument("--poly", required=True, help="Polynomial 'd; a0, ..., ad', or @file")
    p.add_argument("--order", type=int, default=5, help="Truncation order M")
    p.add_argument("--power", type=int, help="Also print the polynomial part of phi^k")
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=cmd_bottcher)

    p = sub.add_parser("green", help="Green function value with error bound")
    p.add_argument("--poly", required=True)
    p.add_argument("--at", required=True, help="Point x+yi")
    p.add_argument("--n-max", type=int)
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=cmd_green)

    p = sub.add_parser("orbit", help="Exact orbit of a point")
    p.add_argument("--poly", required=True, help="Polynomial, with [..] for QQ[t] when --modulus is given")
    p.add_argument("--point", required=True, help="Starting point p/q, or '[..]' with --modulus")
    p.add_argument("--modulus", help="Follow the orbit in QQ[t]/(f), e.g. '[1, 0, 1]' for t^2 + 1")
    p.add_argument("--max-steps", type=int)
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=cmd_orbit)

    p = sub.add_parser("divisor", help="Divisor order of a dynamical pair")
    p.add_argument("--family", required=True, help="Family 'd; a0, ..., ad' with [..] for QQ[t]")
    p.add_argument("--marked", required=True, help="Marked point, e.g. '[0, 1]' for t")
    p.add_argument("--q-max", type=int)
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=cmd_divisor)

    p = sub.add_parser("symmetry", help="Symmetry groups of a polynomial")
    p.add_argument("--poly", required=True)
    p.add_argument("--decompose", action="store_true", help="Also print a complete decomposition")
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=cmd_symmetry)

    p = sub.add_parser("tables", help="Stratification table as CSV")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(handler=cmd_tables)

    p = sub.add_parser("graph", help="Critically marked dynamical graph")
    p.add_argument("--poly", required=True)
    p.add_argument("--depth", type=int)
    p.add_argument("--special", action="store_true", help="Decide whether the graph is special")
    p.add_argument(
        "--json", nargs="?", const="-", metavar="OUT", help="Emit JSON to stdout, or write it to OUT"
    )
    p.set_defaults(handler=cmd_graph)

    p = sub.add_parser("angles", help="Critical portraits and angle orbits")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--periods", help="Cycle periods n1,n2,...")
    p.add_argument("--branch-degrees", help="Portrait set sizes d1,d2,...")
    p.add_argument("--check", help="Print (preperiod, period) of p/q")
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=cmd_angles)

    p = sub.add_parser("count", help="Number of PCF parameters in the unicritical family")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--period", type=int, required=True)
    p.add_argument("--preperiod", type=int, help="k >= 2 for the preperiodic count")
    p.set_defaults(handler=cmd_count)

    p = sub.add_parser("mset", help="Sample whether M_lambda is connected")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--lambda", dest="lam", required=True, help="lambda as x+yi")
    p.add_argument("--grid", type=int)
    p.add_argument("--budget", type=int)
    p.add_argument("--convention", choices=unicritical.CONVENTIONS, default=unicritical.INVERSE)
    p.set_defaults(handler=cmd_mset)

    p = sub.add_parser("render", help="Escape-time raster of M(d, a) as P5 PPM")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--marked", default="[0]", help="Marked point a(t), e.g. '[0]' or '[1, 2]'")
    p.add_argument("--center", default="0+0i")
    p.add_argument("--width", type=float, default=4.0)
    p.add_argument("--size", default="64x64")
    p.add_argument("--budget", type=int)
    p.add_argument("--palette", choices=("binary", "grayscale-g"), default="binary")
    p.add_argument("--output", required=True)
    p.set_defaults(handler=cmd_render)

    p = sub.add_parser("entangle", help="Decide entanglement of two pairs")
    p.add_argument("--pair-a", required=True, help="'<family> | <marked>'")
    p.add_argument("--pair-b", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=cmd_entangle)

    return parser


def parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    """Parse command line arguments."""
    return build_parser().parse_args(argv)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point."""
    try:
        args = parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2

    # Load configuration
    try:
        config = Config.from_file(Path(args.config) if args.config else None)
    except ValueError as e:
        print(f"Configuration error: {e}", file=sys.stderr)
        return 1

    log_level = logging.DEBUG if args.verbose else logging.INFO
    log_path = Path(args.log_dir) if args.log_dir else config.log_path
    setup_logging(log_path, log_level)
    logger.debug(f"polydyn v{__version__}: {args.command}")

    handler: Callable[[argparse.Namespace, Config], int] = args.handler
    try:
        return handler(args, config)
    except KeyboardInterrupt:
        logger.info("Interrupted by user")
        return 130
    except (PolydynError, ValueError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return 1
    except Exception as e:
        logger.exception(f"Unexpected error: {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())

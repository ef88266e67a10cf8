"""
Command line front end.

    mermin-args check ARGUMENT.json
    mermin-args model ARGUMENT.json -o model.csv --format csv
    mermin-args protocol CONFIG.json --seed 7

Exit status: 0 on success, 1 on usage or parse errors, 2 when the input
fails validation, 3 when a brute-force or state-size cap is exceeded.
"""

import argparse
import csv
import io
import json
import logging
import os
import sys

from .abelian import GroupElement
from .config import DEFAULT_LIMITS
from .contextuality import (
    Contextual,
    avn_equations,
    build_lhv,
    classify,
    find_global_section,
    is_avn,
    lhv_assignment,
)
from .errors import ResourceLimitError, ValidationError
from .protocol import ProtocolConfig, run_protocol, share_secret, summarize
from .quantum import simulate_model
from .registry import jsonify, objectify
from .scenario import MerminArgument, expected_model, max_deviation, model_rows

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INVALID = 2
EXIT_RESOURCE = 3

MODEL_HEADER = ("context", "label", "choices", "outcome", "probability")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on its own, which is taken by validation
    def error(self, message):
        raise UsageError("{}: {}".format(self.prog, message))


def _read_json(path):
    if path == "-":
        return json.load(sys.stdin), os.getcwd()
    with open(path) as input_file:
        return json.load(input_file), os.path.dirname(os.path.abspath(path))


def _load_argument(path):
    data, _ = _read_json(path)
    return objectify(MerminArgument, data)


def _emit(args, text):
    if args.output:
        with open(args.output, "w", newline="") as output_file:
            output_file.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(args, data):
    _emit(args, json.dumps(data, indent=2, ensure_ascii=False) + "\n")


def _emit_rows(args, header, rows):
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    _emit(args, buffer.getvalue())


def _format_solution(solution):
    if len(solution) == 1:
        return "y = {}".format(solution[0])
    return "y = ({})".format(", ".join(str(y) for y in solution))


def verdict(argument):
    """One-line classification, e.g. 'Contextual (no solution in ℤ/2); AvN over ℤ: yes'."""
    result = classify(argument)
    avn = "yes" if is_avn(argument) else "no"
    if isinstance(result, Contextual):
        head = "Contextual (no solution in {})".format(argument.group)
    else:
        head = "Local ({} in {})".format(_format_solution(result.solution), argument.group)
    return "{}; AvN over ℤ: {}".format(head, avn)


def cmd_check(args, limits):
    if args.format == "csv":
        raise UsageError("check has no csv output, use --format json")
    argument = _load_argument(args.input)
    result = classify(argument)
    if args.format == "json":
        _emit_json(
            args,
            {
                "group": jsonify(argument.group),
                "parties": argument.parties,
                "consistent": True,
                "beta": jsonify(argument.beta),
                "local": not isinstance(result, Contextual),
                "solution": None
                if isinstance(result, Contextual)
                else jsonify(result.solution),
                "avn": is_avn(argument),
            },
        )
    else:
        _emit(args, verdict(argument) + "\n")
    return EXIT_OK


def cmd_model(args, limits):
    model = expected_model(_load_argument(args.input))
    if args.format == "csv":
        _emit_rows(args, MODEL_HEADER, model_rows(model))
    else:
        _emit_json(args, jsonify(model))
    return EXIT_OK


def cmd_quantum(args, limits):
    argument = _load_argument(args.input)
    simulated = simulate_model(argument, cap=limits.state_cap)
    deviation = max_deviation(simulated, expected_model(argument))
    logger.info("Largest deviation from the exact model: %.3e", deviation)
    if args.format == "csv":
        _emit_rows(args, MODEL_HEADER, model_rows(simulated))
    else:
        _emit_json(args, {"max_deviation": deviation, "model": jsonify(simulated)})
    return EXIT_OK


def cmd_lhv(args, limits):
    argument = _load_argument(args.input)
    result = classify(argument)
    if isinstance(result, Contextual):
        section = find_global_section(expected_model(argument), cap=limits.search_cap)
        _emit_json(
            args,
            {
                "local": False,
                "reason": "no solution in {}".format(argument.group),
                "global_section": section is not None,
            },
        )
        return EXIT_OK
    lhv = build_lhv(argument, result.solution)
    branch = lhv_assignment(lhv, lhv.hidden[0])
    _emit_json(
        args,
        {
            "local": True,
            "model": jsonify(lhv),
            "deterministic_branch": [
                {"party": j, "choice": m, "outcome": list(g.residues)}
                for (j, m), g in sorted(branch.items())
            ],
        },
    )
    return EXIT_OK


def cmd_avn(args, limits):
    argument = _load_argument(args.input)
    _emit_json(
        args,
        {
            "avn": is_avn(argument, oracle=args.oracle, cap=limits.search_cap),
            "theory": jsonify(avn_equations(argument)),
        },
    )
    return EXIT_OK


def cmd_protocol(args, limits):
    data, base_dir = _read_json(args.input)
    if args.seed is not None:
        data = dict(data, seed=args.seed)
    config = objectify(ProtocolConfig, data, base_dir)
    group = config.argument.group

    if args.secret:
        secret, _ = _read_json(args.secret)
        report, recovered = share_secret(
            config, objectify(GroupElement, secret, group, plural=True), args.trace
        )
        extra = {
            "secret": None if recovered is None else [list(q.residues) for q in recovered]
        }
    else:
        plaintext = ()
        if args.plaintext:
            values, _ = _read_json(args.plaintext)
            plaintext = objectify(GroupElement, values, group, plural=True)
        report, extra = run_protocol(config, plaintext, args.trace), {}

    sys.stderr.write(summarize(report) + "\n")
    _emit_json(args, dict(jsonify(report, include_trace=args.trace), **extra))
    return EXIT_OK


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("input", help="JSON input file, '-' for stdin")
    common.add_argument("-o", "--output", help="write here instead of stdout")
    common.add_argument(
        "--format", choices=("json", "csv"), help="output format (check prints text by default)"
    )
    common.add_argument("--seed", type=int, help="master seed (protocol)")
    common.add_argument("--cap", type=int, help="brute-force and state-size cap")

    parser = _Parser(
        prog="mermin-args",
        description="Generalised Mermin-type arguments over finite abelian groups",
    )
    parser.add_argument(
        "-v", "--verbose", action="count", default=0, help="-v for info, -vv for debug"
    )
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    commands.add_parser(
        "check", parents=[common], help="validate and classify an argument"
    ).set_defaults(run=cmd_check)
    commands.add_parser(
        "model", parents=[common], help="dump the exact empirical model"
    ).set_defaults(run=cmd_model)
    commands.add_parser(
        "quantum", parents=[common], help="simulate the argument on qudits"
    ).set_defaults(run=cmd_quantum)
    commands.add_parser(
        "lhv", parents=[common], help="build a local hidden variable model"
    ).set_defaults(run=cmd_lhv)

    avn = commands.add_parser("avn", parents=[common], help="All-vs-Nothing theory and verdict")
    avn.add_argument("--oracle", action="store_true", help="also search exhaustively")
    avn.set_defaults(run=cmd_avn)

    protocol = commands.add_parser(
        "protocol", parents=[common], help="simulate the secret sharing protocol"
    )
    source = protocol.add_mutually_exclusive_group()
    source.add_argument("--plaintext", help="JSON list of residues to transmit")
    source.add_argument("--secret", help="JSON list of residues to seal and share")
    protocol.add_argument("--trace", action="store_true", help="include every round")
    protocol.set_defaults(run=cmd_protocol)
    return parser


def run(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except UsageError as err:
        sys.stderr.write("{}\n".format(err))
        return EXIT_USAGE

    logging.basicConfig(
        level=(logging.WARNING, logging.INFO, logging.DEBUG)[min(args.verbose, 2)],
        format="%(levelname)s %(name)s: %(message)s",
    )
    limits = DEFAULT_LIMITS.with_cap(args.cap)
    try:
        return args.run(args, limits)
    except UsageError as err:
        sys.stderr.write("{}\n".format(err))
        return EXIT_USAGE
    except ValidationError as err:
        sys.stderr.write("{}: {}\n".format(type(err).__name__, err))
        return EXIT_INVALID
    except ResourceLimitError as err:
        sys.stderr.write("{}: {}\n".format(type(err).__name__, err))
        return EXIT_RESOURCE
    except (OSError, KeyError, TypeError, ValueError) as err:
        sys.stderr.write("Cannot read input: {}\n".format(err))
        return EXIT_USAGE


def main():
    sys.exit(run())

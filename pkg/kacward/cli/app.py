import argparse
import json
import sys
from typing import List, Optional, Sequence

import uvicorn

from kacward.cli.commands import CommandResult, execute, execute_all
from kacward.cli.config import RunConfig, load_run_configs
from kacward.cli.reports import VerifyReport
from kacward.serve.app import create_app
from kacward.utils.logging import logger, set_verbosity

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

# argparse dest -> RunConfig field
_RUN_FIELDS = ('N', 'K', 'kmin', 'kmax', 'steps', 'max_order', 'quad_res', 'n', 'x', 'y', 'direction', 'u', 'method',
               'format', 'out')

_HELP = {
    'brute': "Partition function by enumerating every spin configuration.",
    'graphs': "Partition function from the even-subgraph polynomial.",
    'identity': "Compare the graph polynomial with the signed closed-path product.",
    'amplitude': "Amplitude of arriving at (x, y) after n steps from the origin.",
    'trace': "Mean trace of (uM)^n against walk enumeration and the real-space recursion.",
    'free-energy': "Free energy per site in the thermodynamic limit.",
    'critical': "Critical coupling and the residuals that characterise it.",
    'thermo': "Free energy, internal energy and specific heat over a coupling grid.",
    'verify': "Run every oracle-equivalence check and print a pass/fail table.",
}


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--N', type=int, help="Lattice size (N x N sites).")
    common.add_argument('--K', type=float, help="Single coupling J/(k_B T).")
    common.add_argument('--kmin', type=float, help="First coupling of a grid.")
    common.add_argument('--kmax', type=float, help="Last coupling of a grid.")
    common.add_argument('--steps', type=int, help="Number of grid points.")
    common.add_argument('--max-order', dest='max_order', type=int, help="Highest power of u or longest path.")
    common.add_argument('--quad-res', dest='quad_res', type=int, help="Quadrature nodes per axis.")
    common.add_argument('--n', type=int, help="Step count for amplitude and trace.")
    common.add_argument('--x', type=int, help="Target column for amplitude.")
    common.add_argument('--y', type=int, help="Target row for amplitude.")
    common.add_argument('--dir', dest='direction', choices=('U', 'D', 'L', 'R'), help="Arrival direction.")
    common.add_argument('--u', type=float, help="Weight per step for amplitude and trace.")
    common.add_argument('--method', choices=('grid', 'line'), help="Free-energy quadrature route.")
    common.add_argument('--format', choices=('json', 'csv', 'text'), help="Output format.")
    common.add_argument('--out', help="Write output to this path instead of standard output.")
    return common


def _verbosity_flags() -> argparse.ArgumentParser:
    flags = argparse.ArgumentParser(add_help=False)
    group = flags.add_mutually_exclusive_group()
    group.add_argument('-v', '--verbose', action='store_true', help="Log at DEBUG level.")
    group.add_argument('-q', '--quiet', action='store_true', help="Log warnings only.")
    return flags


def build_parser() -> argparse.ArgumentParser:
    verbosity = _verbosity_flags()
    common = _common_flags()
    parser = argparse.ArgumentParser(
        prog='kacward', description="Exact 2D Ising partition function by brute force, graphs and signed paths.")
    sub = parser.add_subparsers(dest='command', required=True)

    for command, help_text in _HELP.items():
        sub.add_parser(command, parents=[common, verbosity], help=help_text, description=help_text)

    run = sub.add_parser('run', parents=[verbosity], help="Execute the runs listed in a YAML config.")
    run.add_argument('--config', required=True, help="YAML file with a 'runs:' list.")
    run.add_argument('--env-file', dest='env_file', help="Optional .env file.")
    run.add_argument('names', nargs='*', help="Only execute runs with these names.")

    serve = sub.add_parser('serve', parents=[verbosity], help="Serve the routes over HTTP.")
    serve.add_argument('--host', default='127.0.0.1')
    serve.add_argument('--port', type=int, default=8000)
    serve.add_argument('--config', help="YAML file with named runs exposed at /run.")
    serve.add_argument('--env-file', dest='env_file', help="Optional .env file.")

    sub.add_parser('schema', parents=[verbosity], help="Print the JSON schema of the verification report.")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    """Build a RunConfig from parsed flags; flags left unset keep the model defaults."""
    fields = {name: getattr(args, name) for name in _RUN_FIELDS if getattr(args, name, None) is not None}
    return RunConfig(command=args.command, **fields)


def emit(text: str, out: Optional[str] = None) -> None:
    """Write text to a file, or to standard output when out is None."""
    if not text.endswith('\n'):
        text += '\n'
    if out is None:
        sys.stdout.write(text)
        return
    try:
        with open(out, 'w', encoding='utf-8') as f:
            f.write(text)
    except OSError as e:
        raise OSError(f"Could not write output file {out}: {e}") from e
    logger.info(f"wrote {out}")


def _emit_result(cfg: RunConfig, result: CommandResult) -> None:
    emit(result.render(cfg.format), cfg.out)


def _run_configs(config_file_path: str, env_file_path: Optional[str], names: List[str]) -> bool:
    configs = load_run_configs(config_file_path, env_file_path)
    unknown = set(names) - {cfg.name for cfg in configs}
    if unknown:
        raise ValueError(f"No run named {', '.join(sorted(unknown))} in {config_file_path}")
    selected = [cfg for cfg in configs if not names or cfg.name in names]
    results = execute_all(selected)
    for cfg, result in zip(selected, results):
        _emit_result(cfg, result)
    return all(result.passed for result in results)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Entry point of the `kacward` console script.

    Returns:
        int: 0 when everything ran and every comparison passed, 1 when a comparison failed or an I/O or
        numerical error occurred, 2 on invalid arguments.
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    set_verbosity(args.verbose, args.quiet)

    try:
        if args.command == 'schema':
            emit(json.dumps(VerifyReport.model_json_schema(), indent=2))
            return EXIT_OK
        if args.command == 'serve':
            uvicorn.run(create_app(args.config, args.env_file), host=args.host, port=args.port)
            return EXIT_OK
        if args.command == 'run':
            passed = _run_configs(args.config, args.env_file, args.names)
        else:
            cfg = config_from_args(args)
            result = execute(cfg)
            _emit_result(cfg, result)
            passed = result.passed
    except ValueError as e:
        # pydantic validation errors and size guards land here
        sys.stderr.write(f"kacward {args.command}: {e}\n")
        return EXIT_USAGE
    except (OSError, ArithmeticError) as e:
        sys.stderr.write(f"kacward {args.command}: {e}\n")
        return EXIT_FAILED

    return EXIT_OK if passed else EXIT_FAILED


if __name__ == '__main__':
    sys.exit(main())

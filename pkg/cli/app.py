import argparse
import logging
import sys

from cli.commands.bench_command import BenchCommand
from cli.commands.cluster_command import ClusterCommand
from cli.commands.diagnose_command import DiagnoseCommand
from cli.commands.gen_command import GenCommand
from cli.commands.oracle_command import OracleCommand
from cli.constants import EXIT_INVALID_INPUT
from cli.writers.error_writer import write_error
from fair_sor_api.errors import FairSorError, InvalidInputError

COMMANDS = (GenCommand, ClusterCommand, OracleCommand, DiagnoseCommand, BenchCommand)


def build_parser(commands):
    parser = argparse.ArgumentParser(prog="fair-sor", description="Fair sum-of-radii clustering")
    parser.add_argument("--verbose", action="store_true", help="log every pipeline step")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in commands.values():
        sub = subparsers.add_parser(command.name, help=command.help)
        command.add_arguments(sub)
    return parser


def setup_logging(verbose):
    logging.basicConfig(format="%(message)s",
                        level=logging.DEBUG if verbose else logging.WARNING,
                        stream=sys.stderr,
                        force=True)


def run_cli(argv):
    commands = {command.name: command() for command in COMMANDS}
    parser = build_parser(commands)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_:
        return EXIT_INVALID_INPUT if exit_.code else 0
    setup_logging(args.verbose)
    command = commands[args.command]
    try:
        return command.run(args)
    except FairSorError as error:
        return write_error(error)
    except (OSError, UnicodeError) as error:
        return write_error(InvalidInputError(str(error)))

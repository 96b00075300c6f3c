"""Main entry point and argument parsing for ef-family."""

import argparse
import logging
import sys
from collections.abc import Callable, Sequence

from effamily.errors import EFError

from .commands import build_command, export_command, reduce_command, seq_command, verify_command, witness_command
from .config import COLORS, EXIT_ERROR, Settings, console, load_settings
from .ui import emit_json, render_error, setup_logging

logger = logging.getLogger(__name__)

Handler = Callable[[argparse.Namespace, Settings, list[str]], int]

HANDLERS: dict[str, Handler] = {
    "build": build_command,
    "seq": seq_command,
    "verify": verify_command,
    "witness": witness_command,
    "reduce": reduce_command,
    "export": export_command,
}


def _add_params(parser: argparse.ArgumentParser, *, defaults: bool) -> None:
    parser.add_argument("--alpha", type=int, required=not defaults, default=1 if defaults else None, help="Exponent alpha (integer >= 1)")
    parser.add_argument("--beta", type=int, required=not defaults, default=2 if defaults else None, help="Exponent beta (integer > alpha)")
    parser.add_argument("--delta", required=not defaults, default="1/2" if defaults else None, help="Rational delta in (0, 1), as P/Q")


def build_parser() -> argparse.ArgumentParser:
    """Parser for every subcommand."""
    parser = argparse.ArgumentParser(
        prog="ef-family",
        description="Exact construction and certification of the E_f continuum family",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("-v", "--verbose", action="count", default=0, help="More logging (-v INFO, -vv DEBUG)")
    subparsers = parser.add_subparsers(dest="command", required=True, help="Command to run")

    build = subparsers.add_parser("build", help="Build and certify a family tree archive")
    _add_params(build, defaults=False)
    build.add_argument("--levels", type=int, required=True, help="Deepest string length")
    build.add_argument("--search-cap", type=int, default=None, help="Steps allowed per witness search (default: EF_SEARCH_CAP or 2^20)")
    build.add_argument("--out", required=True, help="Archive file to write")

    seq = subparsers.add_parser("seq", help="Build and certify a standalone sequence")
    _add_params(seq, defaults=True)
    seq.add_argument("--mask", required=True, help="HOLD/UPDATE entries for n = 2, 3, ..., e.g. HUUH")
    seq.add_argument("--depth", type=int, default=None, help="Depth N; the mask is repeated to cover n = 2 ... N")
    seq.add_argument("--out", default=None, help="Archive file to write (default: archive JSON on stdout)")

    verify = subparsers.add_parser("verify", help="Recompute every certificate of an archive")
    verify.add_argument("file", help="Archive file")

    witness = subparsers.add_parser("witness", help="Certified ratios for two members of a tree archive")
    witness.add_argument("file", help="Tree archive file")
    witness.add_argument("--xi", required=True, help="First binary string")
    witness.add_argument("--zeta", required=True, help="Second binary string")

    reduce = subparsers.add_parser("reduce", help="Apply theta_1 and check the sandwich inequality")
    reduce.add_argument("file", help="Archive file")
    reduce.add_argument("--xi", default=None, help="Member of a tree archive")
    reduce.add_argument("--x", required=True, help='Comma-separated rationals, e.g. "3/4,-1/2"')
    reduce.add_argument("--xhat", required=True, help="Comma-separated rationals")

    export = subparsers.add_parser("export", help="Plot-ready table of n, u_n, phi, f, kappa^beta")
    export.add_argument("file", help="Archive file")
    export.add_argument("--format", choices=("json", "csv"), default="json", help="Output format")
    export.add_argument("--xi", default=None, help="Member of a tree archive (default: all zeros)")

    return parser


def _log_level(verbose: int, settings: Settings) -> str:
    if verbose >= 2:  # noqa: PLR2004
        return "DEBUG"
    if verbose == 1:
        return "INFO"
    return settings.log_level


def cli_main(argv: Sequence[str] | None = None) -> int:
    """Entry point for console script.

    Returns:
        0 if every requested certificate passes, 1 if one fails, 2 on a usage
        or module error (reported as JSON on stdout).
    """
    arguments = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(arguments)
    try:
        settings = load_settings()
        setup_logging(_log_level(args.verbose, settings))
        return HANDLERS[args.command](args, settings, arguments)
    except EFError as e:
        error = e.to_dict()
    except ValueError as e:
        error = {"error": type(e).__name__, "message": str(e)}
    except KeyboardInterrupt:
        # Clean exit on Ctrl+C - suppress ugly traceback
        console.print("\n[yellow]Interrupted[/yellow]", style=COLORS["dim"])
        return EXIT_ERROR
    logger.debug("Command %s failed: %s", args.command, error)
    render_error(error)
    emit_json(error)
    return EXIT_ERROR

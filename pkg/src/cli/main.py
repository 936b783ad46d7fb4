"""
Command-line entry point: chainwave <subcommand> --config <path> [--out <dir>]
"""
import argparse
import logging
import sys
import time
from pathlib import Path
from typing import Callable, Dict, List, Optional

from .. import __version__
from ..exceptions import ChainwaveError
from ..runconfig.loader import dump_config, load_config
from ..utils.file_utils import create_directory
from .commands import run_decay_fit, run_modes, run_resolvent, run_simulate, run_spectrum
from .verify import run_verify

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
EXIT_FILESYSTEM = 4

COMMANDS: Dict[str, Callable] = {
    'spectrum': run_spectrum,
    'modes': run_modes,
    'simulate': run_simulate,
    'resolvent': run_resolvent,
    'decay-fit': run_decay_fit,
    'verify': run_verify,
}

DESCRIPTIONS = {
    'spectrum': "Roots of the characteristic function, classified by asymptotic family",
    'modes': "Eigenmodes for the lowest roots, sampled per edge",
    'simulate': "Energy trace of one feedback variant",
    'resolvent': "Resolvent norms along the imaginary axis",
    'decay-fit': "Polynomial decay fit of an energy trace",
    'verify': "Full property suite; exits 1 on any failure",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chainwave",
        description="Spectra and boundary-feedback dynamics of serially connected string/beam chains."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    for name, description in DESCRIPTIONS.items():
        sub = subparsers.add_parser(name, help=description, description=description)
        sub.add_argument("--config", type=Path, required=True, help="TOML run configuration")
        sub.add_argument("--out", type=Path, default=None,
                         help="Output directory (default: output.directory from the config)")
        sub.add_argument("--verbose", action="store_true", help="Log at DEBUG level")
        if name == 'decay-fit':
            sub.add_argument("--trace", type=Path, default=None,
                             help="Trace CSV to fit (default: <out>/trace.csv)")

    return parser


def setup_logging(verbose: bool = False):
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format=LOG_FORMAT,
        force=True
    )


def attach_run_log(out_dir: Path) -> logging.Handler:
    handler = logging.FileHandler(out_dir / "run.log", mode="w", encoding="utf-8")
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    logging.getLogger().addHandler(handler)
    return handler


def report_error(error: BaseException):
    print(f"chainwave:error:{type(error).__name__}: {error}", file=sys.stderr)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.verbose)

    handler = None
    try:
        config = load_config(args.config)
        out_dir = create_directory(args.out or config.output.directory)
        handler = attach_run_log(out_dir)

        logger.info(f"chainwave {__version__}: {args.command}")
        logger.info(f"Resolved configuration:\n{dump_config(config)}")
        start = time.perf_counter()

        if args.command == 'decay-fit':
            code = run_decay_fit(config, out_dir, args.trace)
        else:
            code = COMMANDS[args.command](config, out_dir)

        logger.info(f"{args.command} finished in {time.perf_counter() - start:.2f} s with exit code {code}")
        return code

    except ChainwaveError as e:
        logger.error(f"{type(e).__name__}: {e}")
        report_error(e)
        return e.exit_code
    except OSError as e:
        logger.error(f"Filesystem error: {e}")
        report_error(e)
        return EXIT_FILESYSTEM
    finally:
        if handler is not None:
            logging.getLogger().removeHandler(handler)
            handler.close()

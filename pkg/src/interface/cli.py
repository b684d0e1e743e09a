"""
Command-line entry point for telapa-lab.
"""

import argparse
import logging
import sys
from typing import List, Optional

from colorama import Fore, Style, init

from .commands import CommandHandler
from ..runner import CURRICULA, METHODS, RuntimeSettings
from ..utils.errors import TelapaError

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='telapa',
        description='Continual RL with per-task policy archives in a shared latent behavior space',
    )
    parser.add_argument('--log-level', help='Overrides TELAPA_LOG_LEVEL')
    parser.add_argument('--verbose', action='store_true', help='Debug logging')
    parser.add_argument('--no-color', action='store_true', help='Plain output')
    sub = parser.add_subparsers(dest='command', required=True)

    run = sub.add_parser('run', help='Run one method and seed over a curriculum')
    run.add_argument('--config', help='JSON run config (defaults when omitted)')
    run.add_argument('--method', choices=METHODS)
    run.add_argument('--seed', type=int)
    run.add_argument('--curriculum', choices=[*CURRICULA, 'custom'])
    run.add_argument('--out', help='Output root (TELAPA_OUTPUT_DIR by default)')

    illuminate = sub.add_parser('illuminate', help="Rebuild one task's archive from a finished run")
    illuminate.add_argument('--run-dir', required=True)
    illuminate.add_argument('--task', required=True, help='Task tag, e.g. B')
    illuminate.add_argument('--config', help="Config to use instead of the run's own")

    analyze = sub.add_parser('analyze', help='Write the analysis tables of one run')
    analyze.add_argument('--run-dir', required=True)
    analyze.add_argument('--out', help='Defaults to <run-dir>/analysis')
    analyze.add_argument('--thresholds', help='thresholds.json from a suite')

    report = sub.add_parser('report', help='Re-emit the report of a finished suite')
    report.add_argument('--suite-dir', required=True)

    suite = sub.add_parser('suite', help='Run several methods over several seeds')
    suite.add_argument('--config')
    suite.add_argument('--methods', help='Comma-separated; all methods when omitted')
    suite.add_argument('--seeds', help='Comma-separated or a range such as 0-4')
    suite.add_argument('--curriculum', choices=[*CURRICULA, 'custom'])
    suite.add_argument('--out')
    return parser


def configure_logging(level: str) -> None:
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    )


def main(argv: Optional[List[str]] = None) -> int:
    """
    Parse arguments and run a command.

    Returns:
        0 on success, 1 on a lab error or failed suite runs, 130 on interrupt
    """
    args = build_parser().parse_args(argv)
    try:
        settings = RuntimeSettings.from_environment()
    except TelapaError as e:
        print(f"{Fore.RED}Error: {e}{Style.RESET_ALL}")
        return 1
    configure_logging('DEBUG' if args.verbose else args.log_level or settings.log_level)
    init(autoreset=True, strip=args.no_color or None)
    handler = CommandHandler(settings, colors=not args.no_color)
    try:
        return handler.execute(args)
    except KeyboardInterrupt:
        print("\n\nInterrupted.")
        return 130
    except TelapaError as e:
        handler.print_error(str(e))
        logger.debug("Command failed", exc_info=True)
        return 1


if __name__ == "__main__":
    sys.exit(main())

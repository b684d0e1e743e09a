"""
Command handler for the command-line interface.
Maps each subcommand to the runner operation it drives and prints the outcome.
"""

import json
import logging
import os
import time
from argparse import Namespace
from typing import Any, Dict, List, Optional

from colorama import Fore, Style

from ..runner import (
    METHODS,
    RunConfig,
    RuntimeSettings,
    analyze_run,
    illuminate_task,
    load_config,
    load_thresholds,
    read_manifest,
    report_suite,
    run_sequence,
    run_suite,
)
from ..utils.errors import UsageError
from ..utils.formatter import progress_formatter, table_formatter

logger = logging.getLogger(__name__)


def parse_list(text: Optional[str], cast=str) -> List[Any]:
    """Comma-separated values; ``0-4`` style ranges for integers."""
    if not text:
        return []
    values: List[Any] = []
    for part in text.split(','):
        part = part.strip()
        if cast is int and '-' in part[1:]:
            lo, hi = part.split('-', 1)
            values.extend(range(int(lo), int(hi) + 1))
        elif part:
            values.append(cast(part))
    return values


class CommandHandler:
    """
    Executes the ``run``, ``illuminate``, ``analyze``, ``report`` and
    ``suite`` commands.
    """

    def __init__(self, settings: RuntimeSettings, colors: bool = True):
        self.settings = settings
        self.colors = colors
        self.commands = {
            'run': {
                'func': self.cmd_run,
                'description': 'Run one method and seed over a curriculum',
                'usage': 'run --config <file> --method <m> --seed <n>',
            },
            'illuminate': {
                'func': self.cmd_illuminate,
                'description': "Rebuild one task's archive from a finished run",
                'usage': 'illuminate --run-dir <d> --task <tag>',
            },
            'analyze': {
                'func': self.cmd_analyze,
                'description': 'Write the analysis tables of one run',
                'usage': 'analyze --run-dir <d> [--thresholds <json>]',
            },
            'report': {
                'func': self.cmd_report,
                'description': 'Re-emit the report of a finished suite',
                'usage': 'report --suite-dir <d>',
            },
            'suite': {
                'func': self.cmd_suite,
                'description': 'Run several methods over several seeds',
                'usage': 'suite --config <file> --methods <a,b> --seeds <0-4>',
            },
        }

    def execute(self, args: Namespace) -> int:
        if args.command not in self.commands:
            raise UsageError(f"Unknown command {args.command!r}")
        return self.commands[args.command]['func'](args)

    # Output

    def _paint(self, color: str, text: str) -> str:
        return f"{color}{text}{Style.RESET_ALL}" if self.colors else text

    def print_success(self, message: str, details: Optional[Dict[str, Any]] = None) -> None:
        print(self._paint(Fore.GREEN, table_formatter.format_success(message, details)))

    def print_error(self, message: str, suggestion: Optional[str] = None) -> None:
        print(self._paint(Fore.RED, table_formatter.format_error(message, suggestion)))

    def print_header(self, text: str) -> None:
        print(self._paint(Fore.CYAN, f"\n{text}"))
        print('=' * 60)

    # Commands

    def _config(self, args: Namespace) -> RunConfig:
        overrides: Dict[str, Any] = {}
        if getattr(args, 'method', None):
            overrides['method'] = args.method
        if getattr(args, 'seed', None) is not None:
            overrides['seed'] = args.seed
        if getattr(args, 'curriculum', None):
            overrides['curriculum'] = args.curriculum
        return load_config(args.config, overrides)

    def cmd_run(self, args: Namespace) -> int:
        config = self._config(args)
        out = args.out or self.settings.output_dir
        self.print_header(f"Run {config.method} seed {config.seed} ({config.curriculum})")
        started = time.time()
        artifacts = run_sequence(config, out, self.settings.threads)
        self.print_success(f"Run complete in {progress_formatter.format_duration(time.time() - started)}", {
            'run_dir': artifacts.run_dir,
            'env_steps': progress_formatter.format_steps(artifacts.budget['total']),
            'config_hash': config.config_hash()[:12],
        })
        return 0

    def cmd_illuminate(self, args: Namespace) -> int:
        if args.config:
            config = self._config(args)
        else:
            config = RunConfig.from_dict(json.loads(read_manifest(args.run_dir)['config']))
        archive = illuminate_task(args.run_dir, args.task, config)
        summary = archive.summary()
        self.print_success(f"Archive {archive.base_tag} rebuilt", {
            'elites': summary['size'],
            'd_min': summary['d_min'],
            'max_fitness': summary['max_fitness'],
            'embedding_version': summary['embedding_version'],
        })
        return 0

    def cmd_analyze(self, args: Namespace) -> int:
        thresholds = load_thresholds(args.thresholds) if args.thresholds else None
        paths = analyze_run(args.run_dir, args.out, thresholds)
        with open(paths['summary.txt'], 'r', encoding='utf-8') as f:
            print(f.read())
        self.print_success(f"Wrote {len(paths)} files", {'out': os.path.dirname(paths['summary.txt'])})
        return 0

    def cmd_report(self, args: Namespace) -> int:
        result = report_suite(args.suite_dir)
        return self._finish_suite(result)

    def cmd_suite(self, args: Namespace) -> int:
        config = self._config(args)
        methods = parse_list(args.methods) or list(METHODS)
        unknown = [m for m in methods if m not in METHODS]
        if unknown:
            raise UsageError(f"Unknown methods: {', '.join(unknown)}. Choose from: {', '.join(METHODS)}")
        seeds = parse_list(args.seeds, int) or [config.seed]
        out = args.out or self.settings.output_dir
        self.print_header(f"Suite: {', '.join(methods)} x seeds {seeds}")
        result = run_suite(methods, seeds, config, out, self.settings.threads)
        return self._finish_suite(result)

    def _finish_suite(self, result) -> int:
        with open(result.report['summary.txt'], 'r', encoding='utf-8') as f:
            print(f.read())
        if result.failed:
            for failure in result.failed:
                self.print_error(f"{failure['method']} seed {failure['seed']} failed", failure.get('error'))
            return 1
        self.print_success(f"{len(result.results)} runs reported",
                           {'report': os.path.dirname(result.report['summary.txt'])})
        return 0

"""
Command-line interface module for telapa-lab.
Provides the argument parser, the subcommand handler and the entry point.
"""

from .commands import CommandHandler, parse_list
from .cli import build_parser, configure_logging, main

__all__ = [
    'CommandHandler',
    'parse_list',
    'build_parser',
    'configure_logging',
    'main',
]

__version__ = '1.0.0'

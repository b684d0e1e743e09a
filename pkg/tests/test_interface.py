"""Tests for the command-line surface."""

from argparse import Namespace

import pytest

from src.interface import CommandHandler, build_parser, main, parse_list
from src.runner import METHODS, RuntimeSettings
from src.utils.errors import UsageError


class TestParseList:
    def test_empty(self):
        assert parse_list(None) == []
        assert parse_list('') == []

    def test_strings(self):
        assert parse_list('scratch, telapa') == ['scratch', 'telapa']

    def test_integer_ranges(self):
        assert parse_list('0-2,5', int) == [0, 1, 2, 5]

    def test_negative_integer_is_not_a_range(self):
        assert parse_list('-1', int) == [-1]


class TestParser:
    def test_run_arguments(self):
        args = build_parser().parse_args(['run', '--method', 'finetune', '--seed', '3'])
        assert args.command == 'run'
        assert args.method == 'finetune'
        assert args.seed == 3
        assert args.config is None

    def test_unknown_method_rejected(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args(['run', '--method', 'ewc'])

    def test_illuminate_needs_task(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args(['illuminate', '--run-dir', 'runs/x'])

    def test_command_required(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args([])


class TestCommandHandler:
    def test_every_command_documented(self):
        handler = CommandHandler(RuntimeSettings(), colors=False)
        for name, entry in handler.commands.items():
            assert callable(entry['func'])
            assert entry['usage'].startswith(name)

    def test_unknown_command(self):
        handler = CommandHandler(RuntimeSettings(), colors=False)
        with pytest.raises(UsageError):
            handler.execute(Namespace(command='train'))

    def test_unknown_suite_method(self, tmp_path):
        handler = CommandHandler(RuntimeSettings(), colors=False)
        args = Namespace(command='suite', config=None, method=None, seed=None, curriculum=None,
                         methods='scratch,ewc', seeds='0', out=str(tmp_path))
        with pytest.raises(UsageError, match='ewc'):
            handler.execute(args)

    def test_methods_listed(self):
        assert 'telapa' in METHODS and 'scratch_reuse' in METHODS


class TestMain:
    def test_missing_run_dir_exits_with_error(self, tmp_path, monkeypatch, capsys):
        monkeypatch.chdir(tmp_path)
        code = main(['--no-color', 'analyze', '--run-dir', str(tmp_path / 'absent')])
        assert code == 1
        assert 'absent' in capsys.readouterr().out

    def test_bad_environment_exits_with_error(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        monkeypatch.setenv('TELAPA_THREADS', 'many')
        assert main(['report', '--suite-dir', str(tmp_path)]) == 1

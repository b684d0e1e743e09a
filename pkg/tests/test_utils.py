"""Tests for seeding, storage and formatting helpers."""

import json

import numpy as np
import pytest

from src.utils import (
    ArtifactError,
    ArtifactIndex,
    JsonlWriter,
    StaleDescriptorError,
    canonical_json,
    derive_rng,
    derive_seed,
    progress_formatter,
    read_json,
    read_jsonl,
    table_formatter,
    write_json,
)


class TestSeeding:
    def test_same_labels_same_stream(self):
        a = derive_rng(7, 'ppo', 'A').random(5)
        b = derive_rng(7, 'ppo', 'A').random(5)
        assert np.array_equal(a, b)

    def test_labels_separate_streams(self):
        assert derive_seed(7, 'ppo', 'A') != derive_seed(7, 'ppo', 'B')
        assert derive_seed(7, 1) != derive_seed(8, 1)

    def test_seed_is_non_negative(self):
        assert all(derive_seed(s, 'x') >= 0 for s in range(20))


class TestStorage:
    def test_canonical_json_sorted_and_compact(self):
        assert canonical_json({'b': 1, 'a': np.float64(0.5)}) == '{"a":0.5,"b":1}'

    def test_json_round_trip(self, tmp_path):
        path = str(tmp_path / 'sub' / 'doc.json')
        write_json(path, {'values': np.arange(3), 'flag': np.bool_(True)})
        assert read_json(path) == {'values': [0, 1, 2], 'flag': True}

    def test_missing_json(self, tmp_path):
        with pytest.raises(ArtifactError):
            read_json(str(tmp_path / 'nope.json'))

    def test_jsonl_writer(self, tmp_path):
        path = str(tmp_path / 'events.jsonl')
        with JsonlWriter(path) as log:
            log.write({'kind': 'task_start', 'tag': 'A'})
            log.write({'kind': 'visit_end', 'sr': 0.5})
        lines = open(path, encoding='utf-8').read().splitlines()
        assert lines[0] == '{"kind":"task_start","tag":"A"}'
        assert read_jsonl(path)[1]['sr'] == 0.5

    def test_artifact_index(self, tmp_path):
        index = ArtifactIndex(str(tmp_path))
        index.register('metrics.csv', 'table', rows=3)
        index.register('archive.json', 'archive')
        reloaded = ArtifactIndex(str(tmp_path))
        assert reloaded.find('table') == ['metrics.csv']
        assert json.loads((tmp_path / 'index.json').read_text())['archive.json']['kind'] == 'archive'


class TestFormatting:
    def test_table_contains_values(self):
        text = table_formatter.format_table(['method', 'sr'], [['telapa', 0.5], ['scratch', None]])
        assert 'telapa' in text and '0.500' in text and 'n/a' in text

    def test_mean_ci(self):
        assert table_formatter.format_mean_ci(0.25, 0.05) == '0.250 ± 0.050'
        assert table_formatter.format_mean_ci(float('nan'), 0.1) == 'n/a'

    def test_progress_bar(self):
        assert progress_formatter.format_progress_bar(5, 10, width=10).startswith('[#####-----]')
        assert progress_formatter.format_steps(2_500_000) == '2.50M'


def test_stale_error_carries_versions():
    err = StaleDescriptorError(expected=3, found=2)
    assert err.expected == 3 and err.found == 2

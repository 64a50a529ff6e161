# Copyright (C) 2021 The fea2fea Authors. All Rights Reserved.
#
#     File:    test_cli.py
#     Author:  fea2fea developers
#     Date:    2021-06-15
#
#   Licensed under the Apache License, Version 2.0 (the "License");
#   you may not use this file except in compliance with the License.
#   You may obtain a copy of the License at
#
#       http://www.apache.org/licenses/LICENSE-2.0
#
#   Unless required by applicable law or agreed to in writing, software
#   distributed under the License is distributed on an "AS IS" BASIS,
#   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
#   See the License for the specific language governing permissions and
#   limitations under the License.

#
# Imports
#

# core python
import io
import json
import os

# third party
import click
import mock
import pytest
from click.testing import CliRunner

# this project
from fea2fea.exceptions import (ConfigurationError, DegenerateFeatureError, GraphFormatError,
                                PageRankConvergenceError, TrainingDivergedError)
from fea2fea.features import FEATURE_NAMES
from fea2fea.util.cli import cli, exit_code_for, parse_values
from fea2fea.util.export import read_csv, read_json

#
# Helpers
#

TINY_MODEL = ['--n', '30', '--seeds', '1', '--epochs', '2', '--hidden', '4', '--depth', '1',
              '--jobs', '1', '--bins', '2']


def invoke(*args):
    """Run the command group the way the entrypoint does"""
    return CliRunner().invoke(cli, list(args), obj={})


def read_bytes(path):
    """File contents"""
    with io.open(path, 'rb') as result_file:
        return result_file.read()

#
# Tests
#


@pytest.mark.parametrize('error,code', [
    (PageRankConvergenceError("slow", residual=0.1, iterations=5), 3),
    (TrainingDivergedError("nan"), 3),
    (GraphFormatError("bad line"), 2),
    (DegenerateFeatureError("constant"), 2),
    (ConfigurationError("unknown key"), 1),
])
def test_exit_code_for(error, code):
    """Convergence problems exit 3, bad data 2, everything else 1"""
    assert exit_code_for(error) == code


@pytest.mark.parametrize('param,text,expected', [
    ('bins', '2..10', [2, 3, 4, 5, 6, 7, 8, 9, 10]),
    ('bins', '2..6:2', [2, 4, 6]),
    ('depth', '2,4, 8', [2, 4, 8]),
    ('threshold', '0.5..1.0:0.1', [0.5, 0.6, 0.7, 0.8, 0.9, 1.0]),
    ('threshold', None, [0.5, 0.6, 0.7, 0.8, 0.9, 1.0]),
    ('depth', None, [2, 4, 6, 8, 10]),
])
def test_parse_values(param, text, expected):
    """Ranges include both ends"""
    assert parse_values(param, text) == expected


@pytest.mark.parametrize('param,text', [
    ('bins', '10..2'),
    ('bins', '2..x'),
    ('bins', '2..6:0'),
    ('depth', ','),
    ('bins', '2.5,3'),
])
def test_parse_values_rejects(param, text):
    """Unreadable or empty ranges are usage errors"""
    with pytest.raises(click.BadParameter):
        parse_values(param, text)


def test_synth_is_deterministic(tmp_path):
    """The same seed writes the same edge lists"""

    outputs = []
    for name in ('first', 'second'):
        out_dir = str(tmp_path / name)
        result = invoke('synth', '--n', '40', '--seed', '3', '--count', '2', '--out', out_dir)
        assert result.exit_code == 0, result.output
        outputs.append(out_dir)

    names = sorted(name for name in os.listdir(outputs[0]) if name.endswith('.edges'))
    assert names == ['geometric_n40_s3_000.edges', 'geometric_n40_s3_001.edges']
    for name in names:
        assert read_bytes(os.path.join(outputs[0], name)) == read_bytes(os.path.join(outputs[1], name))
    assert read_bytes(os.path.join(outputs[0], names[0])) != read_bytes(os.path.join(outputs[0], names[1]))
    assert read_json(os.path.join(outputs[0], 'config.json'))['num_nodes'] == 40


def test_features_command(tmp_path):
    """features.tsv has a header and one row per node"""

    out_dir = str(tmp_path / 'run')
    result = invoke('features', '--n', '25', '--out', out_dir)
    assert result.exit_code == 0, result.output

    with io.open(os.path.join(out_dir, 'features.tsv'), encoding='utf-8') as tsv_file:
        lines = tsv_file.read().splitlines()
    assert len(lines) == 26
    assert read_json(os.path.join(out_dir, 'config.json'))['num_nodes'] == 25


def test_single_command(tmp_path):
    """single writes the named 5 x 5 table and its JSON form"""

    out_dir = str(tmp_path / 'run')
    result = invoke('single', '--out', out_dir, *TINY_MODEL)
    assert result.exit_code == 0, result.output

    rows = read_csv(os.path.join(out_dir, 'correlation.csv'))
    assert [row['feature'] for row in rows] == list(FEATURE_NAMES)
    for row in rows:
        for name in FEATURE_NAMES:
            assert row[name] == 'excluded' or 0.0 <= float(row[name]) <= 1.0
    assert os.path.isfile(os.path.join(out_dir, 'correlation.json'))

    config = read_json(os.path.join(out_dir, 'config.json'))
    assert config['num_bins'] == 2
    assert config['hidden_dim'] == 4


def test_config_file_and_flags(tmp_path):
    """Flags override the configuration file"""

    config_path = str(tmp_path / 'run.json')
    with open(config_path, 'w') as config_file:
        json.dump({'num_nodes': 30, 'seed': 9, 'conv_type': 'SAGE'}, config_file)

    out_dir = str(tmp_path / 'run')
    result = invoke('features', '--config', config_path, '--seed', '2', '--out', out_dir)
    assert result.exit_code == 0, result.output

    config = read_json(os.path.join(out_dir, 'config.json'))
    assert config['seed'] == 2
    assert config['num_nodes'] == 30
    assert config['conv_type'] == 'SAGE'


def test_usage_errors_exit_1(tmp_path):
    """Bad flags and bad configuration files exit 1"""

    result = invoke('features', '--dataset-type', 'csv', '--out', str(tmp_path / 'a'))
    assert result.exit_code == 1

    config_path = str(tmp_path / 'run.json')
    with open(config_path, 'w') as config_file:
        json.dump({'learning_rate': 0.1}, config_file)
    result = invoke('features', '--config', config_path, '--out', str(tmp_path / 'b'))
    assert result.exit_code == 1


def test_data_errors_exit_2(tmp_path):
    """Missing and malformed graph files exit 2"""

    result = invoke('features', '--dataset-type', 'edge_list', '--path', str(tmp_path / 'missing'),
                    '--out', str(tmp_path / 'a'))
    assert result.exit_code == 2

    path = tmp_path / 'bad.edges'
    path.write_text(u"0 1\n1 x\n")
    result = invoke('features', '--dataset-type', 'edge_list', '--path', str(path),
                    '--out', str(tmp_path / 'b'))
    assert result.exit_code == 2


def test_sweep_resume(tmp_path):
    """A resumed sweep reuses finished cells"""

    out_dir = str(tmp_path / 'run')
    result = invoke('sweep', '--param', 'bins', '--range', '2,3', '--out', out_dir, *TINY_MODEL)
    assert result.exit_code == 0, result.output

    rows = read_csv(os.path.join(out_dir, 'sweep.csv'))
    assert [row['value'] for row in rows] == ['2', '3']
    assert all(row['status'] in ('ok', 'excluded') for row in rows)

    cell_path = os.path.join(out_dir, 'cells', 'bins-2.json')
    with open(cell_path, 'w') as cell_file:
        json.dump({'param': 'bins', 'value': 2, 'status': 'ok', 'accuracy': 0.125, 'std': 0.0,
                   'survivors': None, 'error': None}, cell_file)

    result = invoke('sweep', '--param', 'bins', '--range', '2,3', '--resume', '--out', out_dir,
                    *TINY_MODEL)
    assert result.exit_code == 0, result.output
    assert read_csv(os.path.join(out_dir, 'sweep.csv'))[0]['accuracy'] == '0.125000'


def test_distribution_command(tmp_path):
    """One histogram row per feature and bin"""

    out_dir = str(tmp_path / 'run')
    result = invoke('distribution', '--n', '30', '--bins', '4', '--out', out_dir)
    assert result.exit_code == 0, result.output

    rows = read_csv(os.path.join(out_dir, 'distribution.csv'))
    assert len(rows) == 5 * 4
    for name in FEATURE_NAMES:
        assert sum(int(row['count']) for row in rows if row['feature'] == name) == 30


@pytest.mark.parametrize('error', [
    PageRankConvergenceError("no fixed point", residual=0.2, iterations=100),
    TrainingDivergedError("loss is nan"),
])
def test_convergence_errors_exit_3(tmp_path, error):
    """Convergence failures inside a command exit 3"""

    with mock.patch('fea2fea.util.cli.build_correlation_matrix', side_effect=error):
        result = invoke('single', '--out', str(tmp_path / 'run'), *TINY_MODEL)
    assert result.exit_code == 3


def test_sweep_records_failures_and_retries_them(tmp_path):
    """A failing cell does not stop the sweep; resume only reruns failed cells"""

    out_dir = str(tmp_path / 'run')
    entry = mock.Mock(is_excluded=False, value=0.5, std=0.0)
    with mock.patch('fea2fea.util.cli.evaluate_pair',
                    side_effect=[TrainingDivergedError("loss is nan"), entry]) as evaluate:
        result = invoke('sweep', '--param', 'bins', '--range', '2,3', '--out', out_dir, *TINY_MODEL)
    assert result.exit_code == 0, result.output
    assert evaluate.call_count == 2

    rows = read_csv(os.path.join(out_dir, 'sweep.csv'))
    assert [row['status'] for row in rows] == ['failed', 'ok']
    assert rows[0]['error'] == 'loss is nan'

    retry = mock.Mock(is_excluded=False, value=0.75, std=0.0)
    with mock.patch('fea2fea.util.cli.evaluate_pair', return_value=retry) as evaluate:
        result = invoke('sweep', '--param', 'bins', '--range', '2,3', '--resume', '--out', out_dir,
                        *TINY_MODEL)
    assert result.exit_code == 0, result.output
    assert evaluate.call_count == 1
    assert evaluate.call_args[0][5] == 2

    rows = read_csv(os.path.join(out_dir, 'sweep.csv'))
    assert [(row['status'], row['accuracy']) for row in rows] == [('ok', '0.750000'), ('ok', '0.500000')]

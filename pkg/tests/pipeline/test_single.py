# Copyright (C) 2021 The fea2fea Authors. All Rights Reserved.
#
#     File:    test_single.py
#     Author:  fea2fea developers
#     Date:    2021-06-22
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
import math

# third party
import numpy as np
import pytest

# this project
from fea2fea.exceptions import ConfigurationError, ExportError
from fea2fea.features import CLU, CONS, DEG, PR, AVGLEN, FEATURE_NAMES
from fea2fea.graph import Graph, NodeDataset, generate_random_geometric
from fea2fea.nn import LayerConfig, TrainConfig
from fea2fea.pipeline import (CorrelationMatrix, PairTask, build_correlation_matrix, evaluate_pair,
                              prepare_data, run_pair, train_pair)
from fea2fea.util.export import read_csv

#
# Helpers
#

SMALL_MODEL = LayerConfig(hidden_dim=8)
SHORT_TRAINING = TrainConfig(epochs=3, patience=0)


@pytest.fixture(scope='module')
def small_matrix():
    """One seed, three epochs, on a 60 node geometric graph"""
    dataset = NodeDataset(generate_random_geometric(60, 0.3, seed=5), name='geometric-60')
    return build_correlation_matrix(dataset, SMALL_MODEL, seeds=(0,), train_config=SHORT_TRAINING)

#
# Tests
#


def test_pair_task_rules():
    """The constant is never an output and indices stay in range"""
    with pytest.raises(ConfigurationError):
        PairTask(DEG, CONS)
    with pytest.raises(ConfigurationError):
        PairTask(5, DEG)
    task = PairTask(PR, AVGLEN, seed=7)
    assert task.label == 'pr->avglen#7'
    assert task.binning.num_bins == 6


def test_bins_are_fit_on_training_nodes(geometric_dataset):
    """The output labels are a function of the training split boundaries"""
    prepared = prepare_data(geometric_dataset)
    outcome = run_pair(PairTask(DEG, DEG, model=SMALL_MODEL, train=SHORT_TRAINING), prepared)
    train_values = prepared.column(DEG)[prepared.train_nodes]
    assert outcome.binning.fitted
    assert outcome.binning.boundaries[-1] == train_values.max()
    assert 0.0 <= outcome.accuracy <= 1.0
    assert outcome.result.epochs_run == 3


def test_train_pair_is_seeded(geometric_dataset):
    """Same task, same accuracy"""
    task = PairTask(CLU, PR, model=SMALL_MODEL, seed=3, train=SHORT_TRAINING)
    assert train_pair(task, geometric_dataset) == train_pair(task, geometric_dataset)


def test_evaluate_pair(geometric_dataset):
    """One accuracy per seed, independent of the worker count"""
    serial = evaluate_pair(geometric_dataset, PR, AVGLEN, SMALL_MODEL, seeds=(0, 1),
                           train_config=SHORT_TRAINING, jobs=1)
    parallel = evaluate_pair(geometric_dataset, PR, AVGLEN, SMALL_MODEL, seeds=(0, 1),
                             train_config=SHORT_TRAINING, jobs=2)
    assert len(serial.accuracies) == 2
    assert serial.accuracies == parallel.accuracies
    with pytest.raises(ConfigurationError):
        evaluate_pair(geometric_dataset, PR, AVGLEN, seeds=())


def test_matrix_structure(small_matrix):
    """Column 0 mirrors row 0, R(cons, cons) is 1 and the diagonal is trained"""
    values = small_matrix.values
    assert values[CONS, CONS] == 1.0
    for i in range(1, 5):
        assert small_matrix.entry(i, CONS).accuracies == small_matrix.entry(CONS, i).accuracies
    assert not small_matrix.excluded.any()
    assert np.all((values >= 0) & (values <= 1))
    assert small_matrix.metadata['dataset'] == 'geometric-60'
    assert small_matrix.metadata['seeds'] == [0]


def test_matrix_files(small_matrix, tmpdir):
    """JSON round trip and a named 5 x 5 CSV"""
    json_path = str(tmpdir.join('correlation.json'))
    csv_path = str(tmpdir.join('correlation.csv'))
    small_matrix.to_json(json_path)
    small_matrix.to_csv(csv_path)

    restored = CorrelationMatrix.from_json(json_path)
    assert np.array_equal(restored.values, small_matrix.values)
    assert restored.metadata == small_matrix.metadata

    rows = read_csv(csv_path)
    assert [row['feature'] for row in rows] == list(FEATURE_NAMES)
    assert [row['cons'] for row in rows[1:]] == [row[name] for row in rows[:1]
                                                 for name in FEATURE_NAMES[1:]]


def test_degenerate_feature_excludes_row_and_column():
    """On a tree clustering is identically 0"""
    tree = NodeDataset(Graph.from_edges(40, [(i, (i - 1) // 2) for i in range(1, 40)]), name='tree')
    matrix = build_correlation_matrix(tree, SMALL_MODEL, seeds=(0,),
                                      train_config=TrainConfig(epochs=1, patience=0))
    assert matrix.excluded[CLU, :].all()
    assert matrix.excluded[:, CLU].all()
    assert not matrix.excluded[DEG, PR]
    assert math.isnan(matrix.values[CLU, DEG])
    assert matrix.entry(DEG, CLU).reason
    assert matrix.redundant(DEG, CLU, 0.99)


def test_from_values_and_redundancy():
    """NaN marks an excluded cell; redundancy is R >= t"""
    values = np.full((5, 5), 0.5)
    values[PR, AVGLEN] = 0.9
    values[DEG, CLU] = np.nan
    matrix = CorrelationMatrix.from_values(values)
    assert matrix.redundant(PR, AVGLEN, 0.85)
    assert not matrix.redundant(AVGLEN, PR, 0.85)
    assert matrix.redundant(DEG, CLU, 0.85)
    assert matrix.excluded.sum() == 1
    with pytest.raises(ConfigurationError):
        CorrelationMatrix.from_values(np.zeros((4, 4)))


def test_from_dict_rejects_bad_documents():
    """The document is validated before use"""
    with pytest.raises(ExportError):
        CorrelationMatrix.from_dict({'entries': []})
    with pytest.raises(ExportError):
        CorrelationMatrix.from_dict({'schema_version': 99, 'features': [], 'entries': []})

# Copyright (C) 2021 The fea2fea Authors. All Rights Reserved.
#
#     File:    test_application.py
#     Author:  fea2fea developers
#     Date:    2021-06-23
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
import os

# third party
import numpy as np
import pytest
import testfixtures

# this project
from fea2fea.exceptions import ConfigurationError
from fea2fea.features import CLU, DEG, PR
from fea2fea.graph import GraphBatch, NodeDataset, generate_random_geometric
from fea2fea.nn import LayerConfig, Tensor, TrainConfig
from fea2fea.pipeline import (GRAPH_MODE, NODE_MODE, AugmentConfig, CombinationModel,
                              augment_features, classify, classify_graphs, classify_nodes,
                              model_inputs, write_report)
from fea2fea.util.export import read_csv, read_json

#
# Helpers
#

SMALL_GNN = LayerConfig(conv_type='GCN', hidden_dim=8, depth=2, use_batchnorm=True, use_skip=True)
SHORT_TRAINING = TrainConfig(epochs=3, patience=0)


def warnings_in(capture):
    """Messages of the captured warnings"""
    return [record.getMessage() for record in capture.records if record.levelname == 'WARNING']

#
# Tests
#


def test_augment_config_defaults():
    """Simple concatenation, mean readout, 64 wide embeddings and 10 folds"""
    cfg = AugmentConfig(members=['pr', 'Deg'])
    assert cfg.members == (DEG, PR)
    assert (cfg.concat_method, cfg.readout, cfg.embed_dim, cfg.num_folds, cfg.split) == \
        ('simple', 'mean', 64, 10, 'ratio')
    assert AugmentConfig.null(concat_method='ntn').members == ()
    assert cfg.to_dict()['members'] == ['deg', 'pr']


@pytest.mark.parametrize("kwargs", [
    {'members': ['cons', 'deg', 'clu', 'pr', 'avglen']},
    {'members': ['eigenvector']},
    {'concat_method': 'outer'},
    {'readout': 'max'},
    {'split': 'random'},
    {'num_folds': 1},
    {'embed_dim': 0},
])
def test_augment_config_rejects(kwargs):
    """Bad members, methods, readouts, splits and sizes"""
    with pytest.raises(ConfigurationError):
        AugmentConfig(**kwargs)


def test_default_stacks():
    """Three GCN blocks for nodes, three GIN blocks for graphs"""
    node = AugmentConfig.default_gnn(NODE_MODE)
    graph = AugmentConfig.default_gnn(GRAPH_MODE)
    assert (node.conv_type, graph.conv_type) == ('GCN', 'GIN')
    for stack in (node, graph):
        assert (stack.depth, stack.hidden_dim, stack.dropout_p) == (3, 64, 0.6)
        assert stack.use_batchnorm and stack.use_skip
    assert AugmentConfig(gnn=SMALL_GNN).layer_config(GRAPH_MODE) is SMALL_GNN


def test_model_inputs_layout(geometric_dataset):
    """Standardised structural columns first, initial features after"""
    x, extra_dim = model_inputs(geometric_dataset, (DEG, CLU))
    assert x.shape == (60, 5)
    assert extra_dim == 3
    assert x[:, 0].mean() == pytest.approx(0.0, abs=1e-12)
    assert np.array_equal(x[:, 2:], geometric_dataset.initial_node_features)


def test_model_inputs_fallbacks():
    """Structural only without initial features; a ones column with neither"""
    dataset = NodeDataset(generate_random_geometric(30, 0.3, seed=1), name='bare')
    with testfixtures.LogCapture() as capture:
        x, extra_dim = model_inputs(dataset, (DEG,))
    assert (x.shape, extra_dim) == ((30, 1), 0)
    assert any("structural features only" in message for message in warnings_in(capture))

    with testfixtures.LogCapture() as capture:
        x, extra_dim = model_inputs(dataset, ())
    assert (x.shape, extra_dim) == ((30, 1), 1)
    assert np.array_equal(x, np.ones((30, 1)))
    assert any("constant input column" in message for message in warnings_in(capture))


def test_augment_without_members_is_identity(geometric_dataset):
    """The initial features come back unchanged"""
    augmented = augment_features(geometric_dataset, AugmentConfig())
    assert np.array_equal(augmented, geometric_dataset.initial_node_features)


def test_augment_width():
    """Two structural features of width 64 plus ten initial columns"""
    graph = generate_random_geometric(40, 0.3, seed=2)
    dataset = NodeDataset(graph, np.random.default_rng(2).normal(size=(40, 10)))
    augmented = augment_features(dataset, AugmentConfig(members=['deg', 'pr'], embed_dim=64))
    assert augmented.shape == (40, 138)
    assert np.array_equal(augmented[:, 128:], dataset.initial_node_features)
    again = augment_features(dataset, AugmentConfig(members=['deg', 'pr'], embed_dim=64))
    assert np.array_equal(augmented, again)


@pytest.mark.parametrize("readout", ['mean', 'sum'])
def test_readout_ignores_node_order(readout):
    """Relabelling a graph's nodes does not change its pooled embedding"""
    graph = generate_random_geometric(15, 0.4, seed=3)
    permutation = np.random.default_rng(3).permutation(15)
    x = np.random.default_rng(4).normal(size=(15, 2))
    moved = np.empty_like(x)
    moved[permutation] = x
    model = CombinationModel(0, 'simple', 4, 2, SMALL_GNN.replace(conv_type='GIN', out_dim=2), 0)
    model.eval()

    original = GraphBatch([graph])
    relabelled = GraphBatch([graph.relabel(permutation)])
    first = model.embed(original.graph, Tensor(x), original.pooling_matrix(readout)).data
    second = model.embed(relabelled.graph, Tensor(moved), relabelled.pooling_matrix(readout)).data
    assert second == pytest.approx(first, abs=1e-10)


def test_classify_nodes(geometric_dataset, tmpdir):
    """A seeded report with embeddings of the first seed"""
    cfg = AugmentConfig(members=['deg'], gnn=SMALL_GNN, embed_dim=4)
    report = classify_nodes(geometric_dataset, cfg, seeds=(0, 1), train_config=SHORT_TRAINING,
                            keep_embeddings=True)
    again = classify_nodes(geometric_dataset, cfg, seeds=(0, 1), train_config=SHORT_TRAINING)
    assert report.accuracies == again.accuracies
    assert len(report.accuracies) == 2
    assert report.embeddings.shape == (60, 8)
    assert report.config_hash == again.config_hash

    report_path = str(tmpdir.join('report.json'))
    embeddings_path = str(tmpdir.join('embeddings.tsv'))
    write_report(report, report_path, embeddings_path)
    document = read_json(report_path)
    assert document['mode'] == NODE_MODE
    assert document['dataset'] == 'geometric-60'
    assert document['config']['augment']['members'] == ['deg']
    assert 'fold_accuracies' not in document
    with open(embeddings_path) as handle:
        rows = handle.read().splitlines()
    assert len(rows) == 60
    assert len(rows[0].split('\t')) == 9


def test_classify_nodes_planetoid_split():
    """Twenty labelled nodes per class, 500 validation and 1000 test nodes"""
    graph = generate_random_geometric(1600, 0.05, seed=8)
    dataset = NodeDataset(graph, node_labels=graph.degrees() % 2, name='geometric-1600')
    cfg = AugmentConfig(gnn=SMALL_GNN, split='planetoid')
    report = classify_nodes(dataset, cfg, train_config=SHORT_TRAINING)
    assert 0.0 <= report.mean <= 1.0


def test_classify_nodes_empty_test_split(geometric_dataset):
    """The benchmark split of a 60 node graph leaves nothing to test on"""
    with pytest.raises(ConfigurationError):
        classify_nodes(geometric_dataset, AugmentConfig(gnn=SMALL_GNN, split='planetoid'),
                       train_config=SHORT_TRAINING)


def test_classify_nodes_needs_labels():
    """Unlabelled graphs cannot be classified"""
    with pytest.raises(ConfigurationError):
        classify_nodes(NodeDataset(generate_random_geometric(20, 0.3, seed=0)))


def test_classify_graphs(small_collection, tmp_path):
    """Every fold trains, the best validation fold reports"""
    cfg = AugmentConfig(members=['clu'], gnn=SMALL_GNN.replace(conv_type='GIN'), embed_dim=4,
                        num_folds=3)
    report = classify_graphs(small_collection, cfg, seeds=(0,), train_config=SHORT_TRAINING,
                             keep_embeddings=True)
    assert report.mode == GRAPH_MODE
    assert len(report.fold_accuracies) == 1
    assert len(report.fold_accuracies[0]) == 3
    assert report.accuracies[0] in report.fold_accuracies[0]
    assert report.embeddings.shape == (12, 8)
    assert report.to_dict()['fold_accuracies'] == report.fold_accuracies

    assert len(report.histories) == 1
    assert [row['epoch'] for row in report.histories[0]] == [1, 2, 3]
    paths = report.write_histories(str(tmp_path))
    assert [os.path.basename(path) for path in paths] == ['history-0.csv']
    assert len(read_csv(paths[0])) == 3


def test_classify_dispatch(small_collection):
    """Datasets pick their task; anything else is refused"""
    cfg = AugmentConfig(gnn=SMALL_GNN.replace(conv_type='GIN'), num_folds=2)
    report = classify(small_collection, cfg, seeds=(0,), train_config=SHORT_TRAINING)
    assert report.mode == GRAPH_MODE
    with pytest.raises(ConfigurationError):
        classify([1, 2, 3])

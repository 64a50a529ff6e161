# Copyright (C) 2021 The fea2fea Authors. All Rights Reserved.
#
#     File:    test_splits.py
#     Author:  fea2fea developers
#     Date:    2021-06-17
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

# third party
import numpy as np
import pytest

# this project
from fea2fea.exceptions import GraphValidationError
from fea2fea.graph import (Graph, NodeDataset, graph_split, kfold, node_split, planetoid_split,
                           split_sizes)

#
# Tests
#


@pytest.mark.parametrize("count, ratios, expected", [
    (10, (0.6, 0.2, 0.2), [6, 2, 2]),
    (11, (0.6, 0.2, 0.2), [7, 2, 2]),
    (9, (0.8, 0.1, 0.1), [9, 0, 0]),
    (3, (0.6, 0.2, 0.2), [3, 0, 0]),
])
def test_split_sizes(count, ratios, expected):
    """Floor every share and spill the remainder into the first"""
    assert split_sizes(count, ratios) == expected


def test_split_sizes_rejects_bad_ratios():
    """Ratios sum to one and are non-negative"""
    with pytest.raises(GraphValidationError):
        split_sizes(10, (0.5, 0.2))
    with pytest.raises(GraphValidationError):
        split_sizes(10, (1.2, -0.2))


def test_node_split_partitions():
    """Masks are disjoint, cover every node and depend only on the seed"""
    dataset = NodeDataset(Graph.from_edges(20, [(i, i + 1) for i in range(19)]))
    first = node_split(dataset, seed=4)
    again = node_split(dataset, seed=4)
    total = first.train_mask.astype(int) + first.val_mask.astype(int) + first.test_mask.astype(int)
    assert total.tolist() == [1] * 20
    assert (int(first.train_mask.sum()), int(first.val_mask.sum()), int(first.test_mask.sum())) == \
        (12, 4, 4)
    assert np.array_equal(first.train_mask, again.train_mask)


def test_node_split_too_small():
    """Fewer than three nodes cannot be split"""
    with pytest.raises(GraphValidationError):
        node_split(NodeDataset(Graph.from_edges(2, [(0, 1)])))


def test_planetoid_split():
    """A fixed number of training nodes per class"""
    labels = np.arange(100) % 4
    dataset = NodeDataset(Graph.from_edges(100, []), node_labels=labels)
    split = planetoid_split(dataset, per_class=5, num_val=20, num_test=30, seed=0)
    assert np.bincount(labels[split.train_mask]).tolist() == [5, 5, 5, 5]
    assert int(split.val_mask.sum()) == 20
    assert int(split.test_mask.sum()) == 30


def test_graph_split():
    """8:1 by default, sorted and disjoint"""
    train, test = graph_split(90, seed=0)
    assert train.shape == (80,)
    assert test.shape == (10,)
    assert np.all(np.diff(train) > 0)
    assert not set(train.tolist()) & set(test.tolist())


def test_graph_split_keeps_a_test_graph():
    """Very small collections still get one test graph"""
    train, test = graph_split(2, seed=0)
    assert train.shape == (1,) and test.shape == (1,)


def test_kfold_covers_each_index_once():
    """Validation folds partition the indices"""
    indices = np.arange(10, 33)
    folds = kfold(indices, num_folds=5, seed=7)
    validation = np.concatenate([val for _, val in folds])
    assert sorted(validation.tolist()) == indices.tolist()
    for train, val in folds:
        assert not set(train.tolist()) & set(val.tolist())
        assert train.shape[0] + val.shape[0] == indices.shape[0]


def test_kfold_rejects():
    """More folds than items"""
    with pytest.raises(GraphValidationError):
        kfold(np.arange(3), num_folds=4)

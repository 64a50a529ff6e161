# Copyright (C) 2021 The fea2fea Authors. All Rights Reserved.
#
#     File:    base.py
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

"""
Dataset preparation shared by the prediction pipelines

Feature prediction always works on nodes.  A single graph keeps its own
split masks; a graph collection is flattened into its disjoint union and
split by whole graphs, so nodes of training graphs train and nodes of test
graphs evaluate.
"""

import logging

# Third Party
import numpy as np

# This project
from fea2fea.exceptions import PipelineException
from fea2fea.features.structural import NodeFeatureMatrix, build_feature_matrix, FEATURE_NAMES
from fea2fea.graph import GraphBatch, GraphCollection, NodeDataset, node_split, split_sizes

LOGGER = logging.getLogger(__name__)

NODE_MODE = 'node'
GRAPH_MODE = 'graph'

DEFAULT_GRAPH_RATIOS = (0.8, 0.1, 0.1)
"""Train/validation/test share of graphs for feature prediction on collections"""


class PreparedData(object):
    """
    A dataset flattened to one graph, with its structural features and a
    fixed node split

    Attributes:
        name (str): Dataset name
        mode (str): ``node`` for a NodeDataset, ``graph`` for a GraphCollection
        graph (Graph): The graph, or the disjoint union of a collection
        features (numpy.ndarray): |V| x 5 structural features
        train_nodes, val_nodes, test_nodes (numpy.ndarray): Node ids per split
        initial_features (numpy.ndarray): |V| x F raw features, or None
        membership (numpy.ndarray): Graph id per node in graph mode, else None
    """

    def __init__(self, name, mode, graph, features, train_nodes, val_nodes, test_nodes,
                 initial_features=None, membership=None):
        self.name = name
        self.mode = mode
        self.graph = graph
        self.features = np.asarray(features, dtype=np.float64)
        self.train_nodes = np.asarray(train_nodes, dtype=np.int64)
        self.val_nodes = np.asarray(val_nodes, dtype=np.int64)
        self.test_nodes = np.asarray(test_nodes, dtype=np.int64)
        self.initial_features = initial_features
        self.membership = membership

        if self.features.shape != (graph.num_nodes, len(FEATURE_NAMES)):
            raise PipelineException("Features {} do not fit a graph of {} nodes".format(
                self.features.shape, graph.num_nodes))
        if not self.train_nodes.size or not self.test_nodes.size:
            raise PipelineException("Dataset '{}' has an empty train or test split".format(name))

    def column(self, index):
        """ One structural feature column """
        return self.features[:, index]

    def splits(self):
        """ {'train': ids, 'val': ids, 'test': ids} """
        return {'train': self.train_nodes, 'val': self.val_nodes, 'test': self.test_nodes}

    def degenerate_features(self):
        """ Indices of non-constant-by-design features that take a single value """
        return [index for index in range(1, len(FEATURE_NAMES))
                if np.ptp(self.features[:, index]) == 0]

    def __repr__(self):
        return "<{} {} mode={} nodes={} train={} val={} test={}>".format(
            self.__class__.__name__, self.name, self.mode, self.graph.num_nodes,
            self.train_nodes.size, self.val_nodes.size, self.test_nodes.size)


def graph_parts(num_graphs, seed, ratios=DEFAULT_GRAPH_RATIOS):
    """ Seeded (train, val, test) graph index arrays by the floor-then-spill rule """

    if num_graphs < 3:
        raise PipelineException("Need at least 3 graphs to split, got {}".format(num_graphs))
    sizes = split_sizes(num_graphs, ratios)
    order = np.random.default_rng(seed).permutation(num_graphs)
    cuts = np.cumsum(sizes)[:-1]
    return tuple(np.sort(part) for part in np.split(order, cuts))


def standardise(values, rows):
    """ Scale columns to zero mean, unit variance over the given rows

    Columns whose spread over rows is zero, such as the constant feature,
    are returned unchanged.
    """
    values = np.asarray(values, dtype=np.float64)
    if values.ndim == 1:
        values = values[:, None]
    reference = values[rows]
    centre = reference.mean(axis=0)
    scale = reference.std(axis=0)
    varying = scale > 0
    out = values.copy()
    out[:, varying] = (values[:, varying] - centre[varying]) / scale[varying]
    return out


def prepare_data(data, seed=0, ratios=None, features=None, **feature_kwargs):
    """ Compute features and fix the split of a dataset

    Arguments:
        data (NodeDataset, GraphCollection or PreparedData): The dataset;
            PreparedData passes through unchanged
        seed (int): Split seed, used when the dataset brings no split
        ratios (tuple, optional): Split ratios, nodes (0.6, 0.2, 0.2) and
            graphs (0.8, 0.1, 0.1) by default
        features (NodeFeatureMatrix or array, optional): Precomputed |V| x 5
            features in node (or union) order
        feature_kwargs: Passed to :func:`build_feature_matrix`

    Returns:
        PreparedData
    """
    if isinstance(data, PreparedData):
        return data

    if isinstance(data, NodeDataset):
        dataset = data
        if not (data.train_mask.any() or data.val_mask.any() or data.test_mask.any()):
            dataset = node_split(data, ratios or (0.6, 0.2, 0.2), seed)
        if features is None:
            features = build_feature_matrix(dataset.graph, **feature_kwargs)
        values = features.values if isinstance(features, NodeFeatureMatrix) else features
        prepared = PreparedData(dataset.name or 'dataset', NODE_MODE, dataset.graph, values,
                                np.flatnonzero(dataset.train_mask), np.flatnonzero(dataset.val_mask),
                                np.flatnonzero(dataset.test_mask), dataset.initial_node_features)

    elif isinstance(data, GraphCollection):
        batch = GraphBatch(data.graphs)
        if features is None:
            features = np.concatenate([build_feature_matrix(g, **feature_kwargs).values
                                       for g in data.graphs])
        values = features.values if isinstance(features, NodeFeatureMatrix) else features
        train, val, test = graph_parts(data.num_graphs, seed, ratios or DEFAULT_GRAPH_RATIOS)
        initial = (np.concatenate(data.initial_node_features)
                   if data.initial_node_features is not None else None)
        prepared = PreparedData(data.name or 'collection', GRAPH_MODE, batch.graph, values,
                                np.flatnonzero(np.isin(batch.membership, train)),
                                np.flatnonzero(np.isin(batch.membership, val)),
                                np.flatnonzero(np.isin(batch.membership, test)),
                                initial, batch.membership)

    else:
        raise PipelineException("Cannot prepare a {}".format(type(data).__name__))

    LOGGER.info("Prepared %r", prepared)
    return prepared

# Copyright (C) 2021 The fea2fea Authors. All Rights Reserved.
#
#     File:    _splits.py
#     Author:  fea2fea developers
#     Date:    2021-06-03
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
Seeded train/validation/test partitions of nodes and graphs
"""

import logging
import math

# Third Party
import numpy as np

# This project
from fea2fea.exceptions import GraphValidationError

_LOGGER = logging.getLogger(__name__)

RATIO_TOLERANCE = 1e-9


def split_sizes(count, ratios):
    """ Bucket sizes for count items: floor every bucket, spill the rest into the first

    Arguments:
        count (int): Number of items
        ratios (tuple): Non-negative ratios summing to 1

    Returns:
        list: sizes summing to count
    """
    if any(r < 0 for r in ratios):
        raise GraphValidationError("Split ratios must be non-negative, got {}".format(ratios))
    if abs(sum(ratios) - 1.0) > RATIO_TOLERANCE:
        raise GraphValidationError("Split ratios must sum to 1, got {} = {}".format(ratios, sum(ratios)))

    # the epsilon keeps 0.6 * 10 from flooring to 5
    sizes = [int(math.floor(count * r + RATIO_TOLERANCE)) for r in ratios]
    sizes[0] += count - sum(sizes)
    return sizes


def node_split(dataset, ratios=(0.6, 0.2, 0.2), seed=0):
    """ Assign nodes to train/val/test masks by a seeded shuffle

    Arguments:
        dataset (NodeDataset): Dataset whose masks are replaced
        ratios (tuple): (train, val, test) ratios summing to 1
        seed (int): Shuffle seed

    Returns:
        NodeDataset: same graph, features and labels with new masks

    Raises:
        GraphValidationError: Fewer than 3 nodes or bad ratios
    """
    num_nodes = dataset.graph.num_nodes
    if num_nodes < 3:
        message = "Cannot split {} nodes into train/val/test".format(num_nodes)
        _LOGGER.error(message)
        raise GraphValidationError(message)

    train_size, val_size, _ = split_sizes(num_nodes, ratios)
    order = np.random.default_rng(seed).permutation(num_nodes)

    masks = [np.zeros(num_nodes, dtype=bool) for _ in range(3)]
    masks[0][order[:train_size]] = True
    masks[1][order[train_size:train_size + val_size]] = True
    masks[2][order[train_size + val_size:]] = True

    _LOGGER.debug("Node split sizes %s/%s/%s with seed %s", train_size, val_size,
                  num_nodes - train_size - val_size, seed)
    return dataset.with_masks(*masks)


def planetoid_split(dataset, per_class=20, num_val=500, num_test=1000, seed=0):
    """ Public benchmark style split: per_class training nodes per label,
    then num_val validation and num_test test nodes from the remainder

    Raises:
        GraphValidationError: For datasets without node labels
    """
    if dataset.node_labels is None:
        raise GraphValidationError("A per-class split needs node labels")

    rng = np.random.default_rng(seed)
    num_nodes = dataset.graph.num_nodes
    train = np.zeros(num_nodes, dtype=bool)

    for label in range(dataset.num_classes):
        members = np.flatnonzero(dataset.node_labels == label)
        train[rng.permutation(members)[:per_class]] = True

    rest = rng.permutation(np.flatnonzero(~train))
    val = np.zeros(num_nodes, dtype=bool)
    test = np.zeros(num_nodes, dtype=bool)
    val[rest[:num_val]] = True
    test[rest[num_val:num_val + num_test]] = True

    return dataset.with_masks(train, val, test)


def graph_split(num_graphs, ratios=(8, 1), seed=0):
    """ Shuffle graph indices into train and test parts by integer ratio

    Returns:
        tuple: (train indices, test indices) as sorted int arrays
    """
    if num_graphs < 2:
        raise GraphValidationError("Cannot split {} graphs".format(num_graphs))

    total = float(sum(ratios))
    train_size, _ = split_sizes(num_graphs, [ratios[0] / total, ratios[1] / total])
    train_size = min(train_size, num_graphs - 1)
    order = np.random.default_rng(seed).permutation(num_graphs)
    return np.sort(order[:train_size]), np.sort(order[train_size:])


def kfold(indices, num_folds=10, seed=0):
    """ Partition indices into num_folds disjoint folds covering each index once

    Returns:
        list: (train indices, validation indices) per fold
    """
    indices = np.asarray(indices, dtype=np.int64)
    if num_folds < 2 or num_folds > indices.shape[0]:
        raise GraphValidationError("Cannot make {} folds out of {} items".format(
            num_folds, indices.shape[0]))

    shuffled = np.random.default_rng(seed).permutation(indices)
    folds = np.array_split(shuffled, num_folds)
    result = []
    for index, fold in enumerate(folds):
        rest = np.concatenate([f for i, f in enumerate(folds) if i != index])
        result.append((np.sort(rest), np.sort(fold)))
    return result

# Copyright (C) 2021 The fea2fea Authors. All Rights Reserved.
#
#     File:    _generators.py
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
Synthetic random geometric graphs in the unit square
"""

import logging
import math

# Third Party
import numpy as np
from scipy.spatial import cKDTree

# This project
from fea2fea.exceptions import GraphValidationError
from ._graph import Graph, GraphCollection

_LOGGER = logging.getLogger(__name__)

MAX_RADIUS = math.sqrt(2.0)
"""Diameter of the unit square"""


def default_radius(n):
    """ Connectivity regime radius 2 * sqrt(ln(n) / (pi * n)) capped at sqrt(2) """

    if n < 2:
        return MAX_RADIUS
    return min(MAX_RADIUS, 2.0 * math.sqrt(math.log(n) / (math.pi * n)))


def sample_points(n, seed):
    """ n points uniform in [0, 1)^2 from numpy's PCG64 seeded with seed """
    return np.random.default_rng(seed).random((n, 2))


def generate_random_geometric(n, radius=None, seed=0):
    """ Connect every pair of uniform points closer than radius

    Arguments:
        n (int): Number of nodes, at least 1
        radius (float, optional): Connection radius in (0, sqrt(2)].  Defaults
            to :func:`default_radius`.
        seed (int): Seed of the point generator.  The same (n, radius, seed)
            always returns the same graph.

    Returns:
        Graph: edges are the pairs at Euclidean distance <= radius

    Raises:
        GraphValidationError: For n < 1 or a radius outside (0, sqrt(2)]
    """
    if n < 1:
        message = "A geometric graph needs at least one node, got n={}".format(n)
        _LOGGER.error(message)
        raise GraphValidationError(message)

    if radius is None:
        radius = default_radius(n)

    if not 0 < radius <= MAX_RADIUS:
        message = "Radius {} is outside (0, sqrt(2)]".format(radius)
        _LOGGER.error(message)
        raise GraphValidationError(message)

    points = sample_points(n, seed)
    pairs = cKDTree(points).query_pairs(radius, output_type='ndarray')

    graph = Graph.from_edges(n, pairs)
    _LOGGER.debug("Generated geometric %s with radius %.4f seed %s", graph, radius, seed)
    return graph


def generate_geometric_collection(num_graphs, node_range, radius_range, seed, num_bins=2):
    """ A graph classification task whose label is the binned median degree

    Each graph draws its node count from node_range and its radius from
    radius_range, both inclusive, with a generator derived from seed.
    Labels split the median degrees at their quantiles so classes are
    balanced.

    Arguments:
        num_graphs (int): Number of graphs
        node_range (tuple): (min, max) node count
        radius_range (tuple): (min, max) radius
        seed (int): Root seed
        num_bins (int): Number of label classes

    Returns:
        GraphCollection: without initial node features
    """
    rng = np.random.default_rng(seed)
    graphs = []
    medians = []
    for _ in range(num_graphs):
        n = int(rng.integers(node_range[0], node_range[1] + 1))
        radius = float(rng.uniform(radius_range[0], radius_range[1]))
        graph = generate_random_geometric(n, radius, int(rng.integers(0, 2 ** 31 - 1)))
        graphs.append(graph)
        medians.append(float(np.median(graph.degrees())))

    medians = np.asarray(medians)
    edges = np.quantile(medians, np.linspace(0.0, 1.0, num_bins + 1)[1:-1])
    labels = np.searchsorted(edges, medians, side='left')
    _, labels = np.unique(labels, return_inverse=True)

    return GraphCollection(graphs, labels, name='geometric-median-degree')

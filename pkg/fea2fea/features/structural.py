# Copyright (C) 2021 The fea2fea Authors. All Rights Reserved.
#
#     File:    structural.py
#     Author:  fea2fea developers
#     Date:    2021-06-04
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
Structural node features

The five features are computed per graph, always in the canonical column
order ``cons, deg, clu, pr, avglen``.
"""

import io
import logging

# Third Party
import numpy as np
from scipy.sparse import csgraph

# This project
from fea2fea.exceptions import FeatureException, PageRankConvergenceError

_LOGGER = logging.getLogger(__name__)

FEATURE_NAMES = ('cons', 'deg', 'clu', 'pr', 'avglen')
"""Canonical column order of the feature matrix"""

CONS, DEG, CLU, PR, AVGLEN = range(len(FEATURE_NAMES))

DEFAULT_DAMPING = 0.85
DEFAULT_TOLERANCE = 1e-8
DEFAULT_MAX_ITER = 200

# sources per shortest path batch; bounds the dense distance block
_BFS_CHUNK = 256


def feature_index(name_or_index):
    """ Resolve ``'deg'`` / ``'Deg'`` / ``1`` to a column index """

    if isinstance(name_or_index, str):
        name = name_or_index.strip().lower()
        if name not in FEATURE_NAMES:
            raise FeatureException("Unknown feature '{}', expected one of {}".format(
                name_or_index, ", ".join(FEATURE_NAMES)))
        return FEATURE_NAMES.index(name)

    index = int(name_or_index)
    if not 0 <= index < len(FEATURE_NAMES):
        raise FeatureException("Feature index {} outside 0..{}".format(index, len(FEATURE_NAMES) - 1))
    return index


def constant_feature(graph, c=1.0):
    """ The constant c for every node """

    if not c > 0:
        raise FeatureException("The constant feature must be positive, got {}".format(c))
    return np.full(graph.num_nodes, float(c))


def degree(graph):
    """ Neighbor count per node """
    return graph.degrees().astype(np.float64)


def clustering_coefficient(graph):
    """ 2 e_u / (k_u (k_u - 1)) with e_u the edges present among u's neighbors

    Nodes with fewer than two neighbors get 0.
    """
    if graph.num_nodes == 0:
        return np.zeros(0)

    adjacency = graph.adjacency()
    # row sums of (A @ A) * A count each neighbor-neighbor edge twice
    closed = np.asarray((adjacency @ adjacency).multiply(adjacency).sum(axis=1)).ravel()
    k = degree(graph)
    possible = k * (k - 1)

    result = np.zeros(graph.num_nodes)
    ok = k >= 2
    result[ok] = closed[ok] / possible[ok]
    return result


def pagerank(graph, q=DEFAULT_DAMPING, tol=DEFAULT_TOLERANCE, max_iter=DEFAULT_MAX_ITER):
    """ PageRank of an undirected graph treated as bidirectional

    Power iteration of PR(u) = (1 - q) / |V| + q * sum_{v in N(u)} PR(v) / deg(v),
    starting from the uniform vector.  The mass of degree-0 nodes is
    spread uniformly over all nodes so the vector keeps summing to 1.

    Arguments:
        graph (Graph): The graph
        q (float): Damping, the probability of following an edge, in [0, 1)
        tol (float): Stop once the largest absolute change is below tol
        max_iter (int): Iteration budget

    Returns:
        numpy.ndarray: PageRank per node

    Raises:
        PageRankConvergenceError: When max_iter is exhausted, with the residual
    """
    if not 0 <= q < 1:
        raise FeatureException("Damping q must lie in [0, 1), got {}".format(q))

    n = graph.num_nodes
    if n == 0:
        return np.zeros(0)

    k = degree(graph)
    dangling = k == 0
    inverse_degree = np.zeros(n)
    inverse_degree[~dangling] = 1.0 / k[~dangling]
    adjacency = graph.adjacency()

    rank = np.full(n, 1.0 / n)
    residual = np.inf
    for iteration in range(1, max_iter + 1):
        dangling_mass = rank[dangling].sum()
        updated = (1.0 - q) / n + q * (adjacency @ (rank * inverse_degree) + dangling_mass / n)
        residual = np.abs(updated - rank).max()
        rank = updated
        if residual < tol:
            _LOGGER.debug("PageRank converged after %s iterations, residual %.3g", iteration, residual)
            return rank

    message = "PageRank did not converge in {} iterations (residual {:.3g} >= {:.3g})".format(
        max_iter, residual, tol)
    _LOGGER.error(message)
    raise PageRankConvergenceError(message, residual=residual, iterations=max_iter)


def average_path_length(graph):
    """ Mean shortest path length from each node to the nodes it can reach

    Unreachable nodes are left out of the mean; a node that reaches no
    other node gets 0.  Distances come from one breadth first search per
    source, in batches.
    """
    n = graph.num_nodes
    result = np.zeros(n)
    if n == 0:
        return result

    adjacency = graph.adjacency()
    for start in range(0, n, _BFS_CHUNK):
        sources = np.arange(start, min(start + _BFS_CHUNK, n))
        distances = csgraph.shortest_path(adjacency, method='D', directed=False,
                                          unweighted=True, indices=sources)
        reachable = np.isfinite(distances) & (distances > 0)
        totals = np.where(reachable, distances, 0.0).sum(axis=1)
        counts = reachable.sum(axis=1)
        has_any = counts > 0
        block = np.zeros(sources.shape[0])
        block[has_any] = totals[has_any] / counts[has_any]
        result[sources] = block

    return result


class NodeFeatureMatrix(object):
    """
    |V| x 5 structural feature matrix in canonical column order

    Attributes:
        values (numpy.ndarray): Read-only feature values
        feature_order (tuple): Column names
    """

    feature_order = FEATURE_NAMES

    def __init__(self, values):
        values = np.array(values, dtype=np.float64, copy=True)
        if values.ndim != 2 or values.shape[1] != len(FEATURE_NAMES):
            raise FeatureException("Feature matrix must be |V| x {}, got {}".format(
                len(FEATURE_NAMES), values.shape))
        values.setflags(write=False)
        self.values = values

    @property
    def num_nodes(self):
        """ Number of rows """
        return self.values.shape[0]

    def column(self, feature):
        """ One feature column by name or index """
        return self.values[:, feature_index(feature)]

    def columns(self, features):
        """ |V| x len(features) block in the order given """
        return self.values[:, [feature_index(f) for f in features]]

    def to_tsv(self, path):
        """ Write the matrix with a ``cons deg clu pr avglen`` header at 17 significant digits """

        with io.open(path, 'w', encoding='utf-8', newline='\n') as tsv_file:
            tsv_file.write(u"\t".join(FEATURE_NAMES) + u"\n")
            for row in self.values:
                tsv_file.write(u"\t".join("{:.17g}".format(x) for x in row) + u"\n")

    @classmethod
    def from_tsv(cls, path):
        """ Read back a matrix written by :meth:`to_tsv` """

        with io.open(path, 'r', encoding='utf-8') as tsv_file:
            header = tsv_file.readline().split()
            if tuple(header) != FEATURE_NAMES:
                raise FeatureException("Unexpected feature header {} in '{}'".format(header, path))
            rows = [[float(x) for x in line.split()] for line in tsv_file if line.strip()]
        return cls(np.array(rows, dtype=np.float64).reshape(-1, len(FEATURE_NAMES)))

    def __eq__(self, other):
        if not isinstance(other, NodeFeatureMatrix):
            return NotImplemented
        return np.array_equal(self.values, other.values)

    def __ne__(self, other):
        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    __hash__ = None

    def __repr__(self):
        return "<{} nodes={}>".format(self.__class__.__name__, self.num_nodes)


def build_feature_matrix(graph, c=1.0, q=DEFAULT_DAMPING, tol=DEFAULT_TOLERANCE,
                         max_iter=DEFAULT_MAX_ITER):
    """ All five structural features of one graph

    Raises:
        PageRankConvergenceError: Propagated from :func:`pagerank`
    """
    columns = [
        constant_feature(graph, c),
        degree(graph),
        clustering_coefficient(graph),
        pagerank(graph, q=q, tol=tol, max_iter=max_iter),
        average_path_length(graph),
    ]
    matrix = NodeFeatureMatrix(np.stack(columns, axis=1) if graph.num_nodes
                               else np.zeros((0, len(FEATURE_NAMES))))
    _LOGGER.debug("Built structural features for %s", graph)
    return matrix


def read_feature_matrix(path):
    """ Feature matrix written by :meth:`NodeFeatureMatrix.to_tsv`

    Raises:
        FeatureException: Wrong header or unreadable file
    """
    try:
        return NodeFeatureMatrix.from_tsv(path)
    except (IOError, OSError, ValueError) as error:
        message = "Cannot read feature matrix '{}': {}".format(path, error)
        _LOGGER.error(message)
        raise FeatureException(message)


def build_collection_features(collection, **kwargs):
    """ Feature matrix per graph; graphs never see each other's nodes """
    return [build_feature_matrix(graph, **kwargs) for graph in collection.graphs]


def feature_histograms(matrix, num_bins=10):
    """ Equal width histogram per feature column

    Arguments:
        matrix (NodeFeatureMatrix or numpy.ndarray): |V| x 5 values
        num_bins (int): Number of histogram bins

    Returns:
        list: one dict per feature with ``feature``, ``edges``, ``counts``,
        ``zero_fraction`` and ``mode_fraction``
    """
    values = matrix.values if isinstance(matrix, NodeFeatureMatrix) else np.asarray(matrix)
    summaries = []
    for index, name in enumerate(FEATURE_NAMES):
        column = values[:, index]
        low, high = (column.min(), column.max()) if column.size else (0.0, 0.0)
        if high == low:
            high = low + 1.0
        counts, edges = np.histogram(column, bins=num_bins, range=(low, high))
        if column.size:
            _, occurrences = np.unique(column, return_counts=True)
            mode_fraction = float(occurrences.max()) / column.size
            zero_fraction = float(np.mean(column == 0))
        else:
            mode_fraction = zero_fraction = 0.0
        summaries.append({
            'feature': name,
            'edges': edges.tolist(),
            'counts': counts.tolist(),
            'zero_fraction': zero_fraction,
            'mode_fraction': mode_fraction,
        })
    return summaries

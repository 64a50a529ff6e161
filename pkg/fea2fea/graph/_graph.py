# Copyright (C) 2021 The fea2fea Authors. All Rights Reserved.
#
#     File:    _graph.py
#     Author:  fea2fea developers
#     Date:    2021-06-02
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
Immutable graph storage in compressed sparse adjacency form, plus the
dataset containers built on top of it.
"""

import logging

# Third Party
import numpy as np
import scipy.sparse as sp

# This project
from fea2fea.exceptions import GraphValidationError


def _frozen(array, dtype):
    """ Return a read-only contiguous copy of array """

    array = np.array(array, dtype=dtype, copy=True)
    array.setflags(write=False)
    return array


class Graph(object):
    """
    Undirected simple graph stored as CSR offsets and sorted neighbor lists

    Attributes:
        num_nodes (int): Number of nodes, ids are 0..num_nodes-1
        offsets (numpy.ndarray): Row pointer of length num_nodes + 1
        neighbors (numpy.ndarray): Concatenated, per node sorted neighbor ids
        num_edges (int): Number of undirected edges
    """

    def __init__(self, num_nodes, offsets, neighbors, validate=True):
        """Constructor

        Arguments:
            num_nodes (int): Number of nodes
            offsets (array-like): CSR row pointer, length num_nodes + 1
            neighbors (array-like): CSR column indices
            validate (bool, optional): Check every invariant.  Only the
                canonicalizing constructors skip this.
        """
        self._num_nodes = int(num_nodes)
        self._offsets = _frozen(offsets, np.int64)
        self._neighbors = _frozen(neighbors, np.int64)
        self._cache = {}

        if validate:
            self.validate()

        self._num_edges = int(self._offsets[-1]) // 2

    @classmethod
    def from_edges(cls, num_nodes, edges):
        """ Build a canonical graph from an iterable of (u, v) pairs.

        Self-loops and duplicate pairs are dropped, every pair becomes an
        undirected edge and neighbor lists come out sorted.

        Arguments:
            num_nodes (int): Number of nodes
            edges (array-like): Shape (m, 2) integer pairs

        Returns:
            Graph: the canonical graph

        Raises:
            GraphValidationError: For negative ids or ids >= num_nodes
        """
        num_nodes = int(num_nodes)
        if num_nodes < 0:
            raise GraphValidationError("Graph needs a non-negative node count, got {}".format(num_nodes))

        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if edges.size:
            if edges.min() < 0 or edges.max() >= num_nodes:
                raise GraphValidationError(
                    "Edge endpoint out of range [0, {}): min {} max {}".format(
                        num_nodes, edges.min(), edges.max()))
            edges = edges[edges[:, 0] != edges[:, 1]]

        rows = np.concatenate([edges[:, 0], edges[:, 1]])
        cols = np.concatenate([edges[:, 1], edges[:, 0]])
        data = np.ones(rows.shape[0], dtype=np.int8)

        adjacency = sp.csr_matrix((data, (rows, cols)), shape=(num_nodes, num_nodes))
        # coo -> csr sums duplicates; we only keep the pattern
        adjacency.sum_duplicates()
        adjacency.sort_indices()

        return cls(num_nodes, adjacency.indptr, adjacency.indices, validate=False)

    @classmethod
    def disjoint_union(cls, graphs):
        """ Place graphs side by side with node ids shifted per graph

        Arguments:
            graphs (list): Graph instances

        Returns:
            tuple: (Graph, numpy.ndarray) the union and the per node graph index
        """
        offsets = [np.zeros(1, dtype=np.int64)]
        neighbors = []
        membership = []
        node_shift = 0
        entry_shift = 0

        for index, graph in enumerate(graphs):
            offsets.append(graph.offsets[1:] + entry_shift)
            neighbors.append(graph.neighbors + node_shift)
            membership.append(np.full(graph.num_nodes, index, dtype=np.int64))
            node_shift += graph.num_nodes
            entry_shift += graph.neighbors.shape[0]

        union = cls(node_shift,
                    np.concatenate(offsets),
                    np.concatenate(neighbors) if neighbors else np.zeros(0, dtype=np.int64),
                    validate=False)
        membership = np.concatenate(membership) if membership else np.zeros(0, dtype=np.int64)
        return union, membership

    def validate(self):
        """ Check the structural invariants, raise GraphValidationError on failure """

        if self._num_nodes < 0:
            raise GraphValidationError("Negative node count {}".format(self._num_nodes))

        if self._offsets.shape != (self._num_nodes + 1,):
            raise GraphValidationError("offsets must have length num_nodes + 1 = {}, got {}".format(
                self._num_nodes + 1, self._offsets.shape[0]))

        if self._offsets[0] != 0 or np.any(np.diff(self._offsets) < 0):
            raise GraphValidationError("offsets must start at 0 and be non-decreasing")

        if self._offsets[-1] != self._neighbors.shape[0]:
            raise GraphValidationError("offsets[-1] ({}) does not match neighbor count ({})".format(
                self._offsets[-1], self._neighbors.shape[0]))

        if self._neighbors.shape[0] % 2:
            raise GraphValidationError("Odd number of adjacency entries, cannot be symmetric")

        if self._neighbors.size and (self._neighbors.min() < 0 or
                                     self._neighbors.max() >= self._num_nodes):
            raise GraphValidationError("Neighbor id out of range")

        sources = self._sources()

        loops = np.flatnonzero(sources == self._neighbors)
        if loops.size:
            raise GraphValidationError("Node {} has a self-loop".format(sources[loops[0]]))

        # consecutive entries of the same row must strictly increase
        same_row = sources[1:] == sources[:-1]
        unsorted = np.flatnonzero(same_row & (np.diff(self._neighbors) <= 0))
        if unsorted.size:
            raise GraphValidationError(
                "Neighbors of node {} are unsorted or duplicated".format(sources[unsorted[0]]))

        if not self.is_symmetric():
            raise GraphValidationError("Adjacency is not symmetric")

    def _sources(self):
        """ Row id of every adjacency entry """
        return np.repeat(np.arange(self._num_nodes, dtype=np.int64), np.diff(self._offsets))

    def is_symmetric(self):
        """ Every (u, v) adjacency entry has a matching (v, u) entry """

        forward = self._sources() * max(self._num_nodes, 1) + self._neighbors
        backward = self._neighbors * max(self._num_nodes, 1) + self._sources()
        return bool(np.array_equal(np.sort(forward), np.sort(backward)))

    @property
    def num_nodes(self):
        """ Number of nodes """
        return self._num_nodes

    @property
    def num_edges(self):
        """ Number of undirected edges """
        return self._num_edges

    @property
    def offsets(self):
        """ CSR row pointer """
        return self._offsets

    @property
    def neighbors(self):
        """ CSR column indices """
        return self._neighbors

    def neighbors_of(self, node):
        """ Sorted neighbor ids of node """
        return self._neighbors[self._offsets[node]:self._offsets[node + 1]]

    def degrees(self):
        """ Neighbor count per node as int64 """
        return np.diff(self._offsets)

    def has_edge(self, u, v):
        """ Binary search u's neighbor list for v """
        row = self.neighbors_of(u)
        position = np.searchsorted(row, v)
        return bool(position < row.shape[0] and row[position] == v)

    def edges(self):
        """ Undirected edges as an (m, 2) array with u < v, lexicographically sorted """

        sources = self._sources()
        keep = sources < self._neighbors
        return np.stack([sources[keep], self._neighbors[keep]], axis=1)

    def adjacency(self):
        """ Cached scipy CSR adjacency with unit weights """

        if 'adjacency' not in self._cache:
            data = np.ones(self._neighbors.shape[0], dtype=np.float64)
            self._cache['adjacency'] = sp.csr_matrix(
                (data, self._neighbors, self._offsets),
                shape=(self._num_nodes, self._num_nodes))
        return self._cache['adjacency']

    def cached(self, key, factory):
        """ Memoize a structure derived from this graph.

        Graphs are immutable so derived propagation matrices can be shared
        by every model that runs over the same graph.
        """
        if key not in self._cache:
            self._cache[key] = factory(self)
        return self._cache[key]

    def relabel(self, permutation):
        """ Return the graph with node u renamed to permutation[u] """

        permutation = np.asarray(permutation, dtype=np.int64)
        return Graph.from_edges(self._num_nodes, permutation[self.edges()])

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (self._num_nodes == other.num_nodes and
                np.array_equal(self._offsets, other.offsets) and
                np.array_equal(self._neighbors, other.neighbors))

    def __ne__(self, other):
        result = self.__eq__(other)
        if result is NotImplemented:
            return result
        return not result

    def __hash__(self):
        return hash((self._num_nodes, self._offsets.tobytes(), self._neighbors.tobytes()))

    def __getstate__(self):
        # derived scipy structures are rebuilt on demand after pickling
        state = self.__dict__.copy()
        state['_cache'] = {}
        return state

    def __setstate__(self, state):
        self.__dict__.update(state)

    def __repr__(self):
        return "<{} nodes={} edges={}>".format(self.__class__.__name__,
                                               self._num_nodes, self._num_edges)


class GraphCollection(object):
    """
    Multi-graph dataset with one class label per graph

    Attributes:
        graphs (list): Graph instances
        graph_labels (numpy.ndarray): 0-based contiguous class ids
        node_labels (list): Optional per graph class id arrays
        initial_node_features (list): Optional per graph |V| x F matrices
    """

    def __init__(self, graphs, graph_labels, node_labels=None, initial_node_features=None, name=None):

        self._logger = logging.getLogger(__name__)
        self.graphs = list(graphs)
        self.graph_labels = _frozen(graph_labels, np.int64)
        self.node_labels = None if node_labels is None else [_frozen(x, np.int64) for x in node_labels]
        self.initial_node_features = None if initial_node_features is None else \
            [_frozen(x, np.float64) for x in initial_node_features]
        self.name = name

        self._validate()

    def _validate(self):
        """ Label count, contiguity and feature row counts """

        if self.graph_labels.shape != (len(self.graphs),):
            raise GraphValidationError("Got {} graph labels for {} graphs".format(
                self.graph_labels.shape[0], len(self.graphs)))

        if self.graph_labels.size:
            present = np.unique(self.graph_labels)
            if not np.array_equal(present, np.arange(present.shape[0])):
                raise GraphValidationError("Graph labels must be 0-based contiguous, got {}".format(
                    present.tolist()))

        for index, graph in enumerate(self.graphs):
            if graph.num_nodes == 0:
                raise GraphValidationError("Graph {} has no nodes".format(index))

        for attribute in ('node_labels', 'initial_node_features'):
            per_graph = getattr(self, attribute)
            if per_graph is None:
                continue
            if len(per_graph) != len(self.graphs):
                raise GraphValidationError("{} has {} entries for {} graphs".format(
                    attribute, len(per_graph), len(self.graphs)))
            for index, (graph, values) in enumerate(zip(self.graphs, per_graph)):
                if values.shape[0] != graph.num_nodes:
                    raise GraphValidationError(
                        "{} of graph {} has {} rows, graph has {} nodes".format(
                            attribute, index, values.shape[0], graph.num_nodes))

    @property
    def num_graphs(self):
        """ Number of graphs """
        return len(self.graphs)

    @property
    def num_classes(self):
        """ Number of graph classes """
        return int(self.graph_labels.max()) + 1 if self.graph_labels.size else 0

    def subset(self, indices):
        """ Collection restricted to the given graph indices, labels untouched """

        # a subset may miss some classes, so contiguity is not re-checked
        return _subset(self, [int(i) for i in indices])

    def __len__(self):
        return len(self.graphs)

    def __repr__(self):
        return "<{} name={} graphs={} classes={}>".format(
            self.__class__.__name__, self.name, self.num_graphs, self.num_classes)


def _subset(collection, indices):
    """ Build a collection subset without re-checking label contiguity """

    subset = GraphCollection.__new__(GraphCollection)
    subset._logger = collection._logger  # pylint: disable=protected-access
    subset.graphs = [collection.graphs[i] for i in indices]
    subset.graph_labels = _frozen(collection.graph_labels[indices] if indices else [], np.int64)
    subset.node_labels = None if collection.node_labels is None else \
        [collection.node_labels[i] for i in indices]
    subset.initial_node_features = None if collection.initial_node_features is None else \
        [collection.initial_node_features[i] for i in indices]
    subset.name = collection.name
    return subset


class NodeDataset(object):
    """
    A single graph with per node features, labels and train/val/test masks

    Attributes:
        graph (Graph): The graph
        initial_node_features (numpy.ndarray): |V| x F matrix, may be None
        node_labels (numpy.ndarray): Class id per node, may be None
        train_mask, val_mask, test_mask (numpy.ndarray): Boolean masks
    """

    def __init__(self, graph, initial_node_features=None, node_labels=None,
                 train_mask=None, val_mask=None, test_mask=None, name=None):

        self.graph = graph
        self.name = name
        num_nodes = graph.num_nodes

        self.initial_node_features = None if initial_node_features is None else \
            _frozen(initial_node_features, np.float64)
        self.node_labels = None if node_labels is None else _frozen(node_labels, np.int64)

        empty = np.zeros(num_nodes, dtype=bool)
        self.train_mask = _frozen(empty if train_mask is None else train_mask, bool)
        self.val_mask = _frozen(empty if val_mask is None else val_mask, bool)
        self.test_mask = _frozen(empty if test_mask is None else test_mask, bool)

        self._validate()

    def _validate(self):
        """ Row counts and mask disjointness """

        num_nodes = self.graph.num_nodes

        if self.initial_node_features is not None:
            if self.initial_node_features.ndim != 2 or self.initial_node_features.shape[0] != num_nodes:
                raise GraphValidationError("Initial node features shape {} does not fit {} nodes".format(
                    self.initial_node_features.shape, num_nodes))

        if self.node_labels is not None and self.node_labels.shape != (num_nodes,):
            raise GraphValidationError("Got {} node labels for {} nodes".format(
                self.node_labels.shape[0], num_nodes))

        for mask in (self.train_mask, self.val_mask, self.test_mask):
            if mask.shape != (num_nodes,):
                raise GraphValidationError("Split mask of length {} for {} nodes".format(
                    mask.shape[0], num_nodes))

        overlap = (self.train_mask.astype(int) + self.val_mask.astype(int) +
                   self.test_mask.astype(int))
        if np.any(overlap > 1):
            raise GraphValidationError("Split masks overlap on {} nodes".format(int(np.sum(overlap > 1))))

    @property
    def num_classes(self):
        """ Number of node classes, 0 without labels """
        if self.node_labels is None or not self.node_labels.size:
            return 0
        return int(self.node_labels.max()) + 1

    def with_masks(self, train_mask, val_mask, test_mask):
        """ Same dataset with different split masks """

        return NodeDataset(self.graph, self.initial_node_features, self.node_labels,
                           train_mask, val_mask, test_mask, name=self.name)

    def __repr__(self):
        return "<{} name={} nodes={} train={} val={} test={}>".format(
            self.__class__.__name__, self.name, self.graph.num_nodes,
            int(self.train_mask.sum()), int(self.val_mask.sum()), int(self.test_mask.sum()))


class GraphBatch(object):
    """
    Full batch view of several graphs: their disjoint union plus pooling

    Attributes:
        graph (Graph): Disjoint union
        membership (numpy.ndarray): Graph index per union node
        num_graphs (int): Number of pooled graphs
    """

    def __init__(self, graphs):
        self.graph, self.membership = Graph.disjoint_union(graphs)
        self.num_graphs = len(graphs)
        self._pooling = {}

    def pooling_matrix(self, readout='mean'):
        """ Sparse (num_graphs x num_nodes) matrix implementing the readout

        Arguments:
            readout (str): ``mean`` or ``sum``
        """
        if readout not in ('mean', 'sum'):
            raise GraphValidationError("Unknown readout '{}'".format(readout))

        if readout not in self._pooling:
            num_nodes = self.graph.num_nodes
            weights = np.ones(num_nodes, dtype=np.float64)
            if readout == 'mean':
                counts = np.bincount(self.membership, minlength=self.num_graphs).astype(np.float64)
                weights = 1.0 / counts[self.membership]
            self._pooling[readout] = sp.csr_matrix(
                (weights, (self.membership, np.arange(num_nodes))),
                shape=(self.num_graphs, num_nodes))
        return self._pooling[readout]

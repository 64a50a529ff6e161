# Copyright (C) 2021 The fea2fea Authors. All Rights Reserved.
#
#     File:    _loaders.py
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
Readers and writers for the on-disk graph formats.

* Edge lists: ``<u> <v>`` per line, ``#`` starts a comment
* TUDataset text dumps: ``<name>_A.txt`` and friends, 1-based node ids
* LINQS citation dumps: ``<name>.content`` and ``<name>.cites``
"""

import io
import logging
import os
import re

# Third Party
import numpy as np

# This project
from fea2fea.exceptions import GraphFormatError, GraphValidationError
from ._graph import Graph, GraphCollection, NodeDataset

_LOGGER = logging.getLogger(__name__)

_SEPARATOR = re.compile(r'[\s,]+')


def _strip_comment(line):
    """ Drop a trailing ``#`` comment and surrounding whitespace """
    return line.split('#', 1)[0].strip()


def _parse_int_row(line, path, line_number, expected=None):
    """ Split a comma or whitespace separated row into ints """

    fields = [x for x in _SEPARATOR.split(line) if x]
    if expected is not None and len(fields) != expected:
        message = "{}:{}: expected {} fields, got {}: '{}'".format(
            path, line_number, expected, len(fields), line)
        _LOGGER.error(message)
        raise GraphFormatError(message, path=path, line_number=line_number)
    try:
        values = [int(x) for x in fields]
    except ValueError:
        message = "{}:{}: non-integer field in '{}'".format(path, line_number, line)
        _LOGGER.error(message)
        raise GraphFormatError(message, path=path, line_number=line_number)
    return values


def load_edge_list(path, num_nodes=None):
    """ Read an undirected edge list

    Arguments:
        path (str): UTF-8 text file, one ``u v`` pair per line
        num_nodes (int, optional): Node count.  Defaults to the count in a
            :func:`save_edge_list` header, else 1 + the largest id seen.

    Returns:
        Graph: self-loops and duplicate pairs are dropped

    Raises:
        GraphFormatError: For a malformed line, naming its line number
        GraphValidationError: For an empty file without num_nodes or header
    """
    edges = []

    with io.open(path, 'r', encoding='utf-8') as edge_file:
        for line_number, raw_line in enumerate(edge_file, start=1):
            line = _strip_comment(raw_line)
            if not line:
                continue
            u, v = _parse_int_row(line, path, line_number, expected=2)
            if u < 0 or v < 0:
                message = "{}:{}: negative node id in '{}'".format(path, line_number, line)
                _LOGGER.error(message)
                raise GraphFormatError(message, path=path, line_number=line_number)
            edges.append((u, v))

    if num_nodes is None:
        num_nodes = read_edge_list_header(path)

    if num_nodes is None:
        if not edges:
            message = "Edge list '{}' is empty and no node count was given".format(path)
            _LOGGER.error(message)
            raise GraphValidationError(message)
        num_nodes = 1 + max(max(u, v) for u, v in edges)

    graph = Graph.from_edges(num_nodes, edges)
    _LOGGER.info("Loaded %s from '%s'", graph, path)
    return graph


def save_edge_list(graph, path):
    """ Write each undirected edge once as ``u v`` with u < v

    A header comment records the node count so isolated trailing nodes
    survive the round trip through :func:`load_edge_list`.
    """
    with io.open(path, 'w', encoding='utf-8', newline='\n') as edge_file:
        edge_file.write(u"# nodes {} edges {}\n".format(graph.num_nodes, graph.num_edges))
        for u, v in graph.edges():
            edge_file.write(u"{} {}\n".format(u, v))


def read_edge_list_header(path):
    """ Node count from a :func:`save_edge_list` header, None when absent """

    with io.open(path, 'r', encoding='utf-8') as edge_file:
        first = edge_file.readline()
    match = re.match(r'#\s*nodes\s+(\d+)', first)
    return int(match.group(1)) if match else None


def _read_int_column_file(path, columns=None):
    """ Read every non-empty line of a TUDataset file as a list of int rows """

    rows = []
    with io.open(path, 'r', encoding='utf-8') as column_file:
        for line_number, raw_line in enumerate(column_file, start=1):
            line = raw_line.strip()
            if not line:
                continue
            rows.append(_parse_int_row(line, path, line_number, expected=columns))
    return rows


def _contiguous(labels):
    """ Map arbitrary integer labels onto 0..C-1 preserving order """
    _, inverse = np.unique(np.asarray(labels, dtype=np.int64), return_inverse=True)
    return inverse.astype(np.int64)


def load_tudataset(directory, name):
    """ Read a TUDataset style text dump

    Arguments:
        directory (str): Folder holding the ``<name>_*.txt`` files
        name (str): Dataset prefix, e.g. ``PROTEINS``

    Returns:
        GraphCollection: per graph local 0-based node ids, contiguous graph
        labels and, when node labels exist, their one-hot encoding as
        initial node features

    Raises:
        GraphValidationError: Missing mandatory file, edges crossing graphs
            or graphs without nodes
        GraphFormatError: Malformed rows
    """
    def _path(suffix):
        return os.path.join(directory, "{}_{}.txt".format(name, suffix))

    for suffix in ('A', 'graph_indicator', 'graph_labels'):
        if not os.path.isfile(_path(suffix)):
            message = "TUDataset file '{}' does not exist".format(_path(suffix))
            _LOGGER.error(message)
            raise GraphValidationError(message)

    indicator = np.array([row[0] for row in _read_int_column_file(_path('graph_indicator'), 1)],
                         dtype=np.int64)
    raw_graph_labels = [row[0] for row in _read_int_column_file(_path('graph_labels'), 1)]
    edges = np.array(_read_int_column_file(_path('A'), 2), dtype=np.int64).reshape(-1, 2)

    num_graphs = len(raw_graph_labels)
    num_nodes = indicator.shape[0]

    if num_nodes and (indicator.min() < 1 or indicator.max() > num_graphs):
        raise GraphValidationError("Graph indicator references graphs outside 1..{}".format(num_graphs))

    # indicator is 1-based graph ids per 1-based node id
    graph_of_node = indicator - 1
    counts = np.bincount(graph_of_node, minlength=num_graphs)
    empty = np.flatnonzero(counts == 0)
    if empty.size:
        message = "Graph {} of '{}' has no nodes".format(empty[0] + 1, name)
        _LOGGER.error(message)
        raise GraphValidationError(message)

    # Node ids are global and grouped by graph, so local id = global - first
    order = np.argsort(graph_of_node, kind='stable')
    first_node = np.zeros(num_graphs, dtype=np.int64)
    first_node[1:] = np.cumsum(counts)[:-1]
    local_id = np.empty(num_nodes, dtype=np.int64)
    local_id[order] = np.arange(num_nodes) - first_node[graph_of_node[order]]

    if edges.size:
        if edges.min() < 1 or edges.max() > num_nodes:
            raise GraphValidationError("Edge endpoint outside 1..{}".format(num_nodes))
        edges = edges - 1
        source_graph = graph_of_node[edges[:, 0]]
        crossing = np.flatnonzero(source_graph != graph_of_node[edges[:, 1]])
        if crossing.size:
            u, v = edges[crossing[0]] + 1
            message = "Edge ({}, {}) crosses graphs {} and {}".format(
                u, v, graph_of_node[u - 1] + 1, graph_of_node[v - 1] + 1)
            _LOGGER.error(message)
            raise GraphValidationError(message)
    else:
        source_graph = np.zeros(0, dtype=np.int64)

    graphs = []
    for graph_index in range(num_graphs):
        graph_edges = edges[source_graph == graph_index]
        graphs.append(Graph.from_edges(int(counts[graph_index]), local_id[graph_edges]))

    node_labels = None
    initial_node_features = None
    if os.path.isfile(_path('node_labels')):
        raw_node_labels = np.array([row[0] for row in
                                    _read_int_column_file(_path('node_labels'))], dtype=np.int64)
        if raw_node_labels.shape[0] != num_nodes:
            raise GraphValidationError("Got {} node labels for {} nodes".format(
                raw_node_labels.shape[0], num_nodes))
        node_classes = _contiguous(raw_node_labels)
        one_hot = np.eye(int(node_classes.max()) + 1)[node_classes]
        node_labels = []
        initial_node_features = []
        for graph_index in range(num_graphs):
            members = order[first_node[graph_index]:first_node[graph_index] + counts[graph_index]]
            node_labels.append(node_classes[members])
            initial_node_features.append(one_hot[members])

    collection = GraphCollection(graphs, _contiguous(raw_graph_labels), node_labels,
                                 initial_node_features, name=name)
    _LOGGER.info("Loaded TUDataset %s", collection)
    return collection


def load_linqs(directory, name):
    """ Read a LINQS citation dump (Cora, Citeseer) as a NodeDataset

    ``<name>.content`` rows are ``<paper-id> <word attributes...> <label>``
    and ``<name>.cites`` rows are ``<cited> <citing>``.  Citations that
    mention papers missing from the content file are skipped.

    Returns:
        NodeDataset: without split masks, see :func:`node_split`
    """
    content_path = os.path.join(directory, "{}.content".format(name))
    cites_path = os.path.join(directory, "{}.cites".format(name))

    for path in (content_path, cites_path):
        if not os.path.isfile(path):
            message = "LINQS file '{}' does not exist".format(path)
            _LOGGER.error(message)
            raise GraphValidationError(message)

    ids = {}
    features = []
    labels = []
    with io.open(content_path, 'r', encoding='utf-8') as content_file:
        for line_number, raw_line in enumerate(content_file, start=1):
            fields = raw_line.split()
            if not fields:
                continue
            if len(fields) < 3:
                raise GraphFormatError("{}:{}: too few fields".format(content_path, line_number),
                                       path=content_path, line_number=line_number)
            if fields[0] in ids:
                raise GraphFormatError("{}:{}: duplicate paper id {}".format(
                    content_path, line_number, fields[0]), path=content_path, line_number=line_number)
            try:
                features.append([float(x) for x in fields[1:-1]])
            except ValueError:
                raise GraphFormatError("{}:{}: non-numeric attribute".format(content_path, line_number),
                                       path=content_path, line_number=line_number)
            ids[fields[0]] = len(ids)
            labels.append(fields[-1])

    edges = []
    skipped = 0
    with io.open(cites_path, 'r', encoding='utf-8') as cites_file:
        for line_number, raw_line in enumerate(cites_file, start=1):
            fields = raw_line.split()
            if not fields:
                continue
            if len(fields) != 2:
                raise GraphFormatError("{}:{}: expected 2 fields".format(cites_path, line_number),
                                       path=cites_path, line_number=line_number)
            if fields[0] not in ids or fields[1] not in ids:
                skipped += 1
                continue
            edges.append((ids[fields[0]], ids[fields[1]]))

    if skipped:
        _LOGGER.warning("Skipped %s citations to papers missing from %s", skipped, content_path)

    widths = set(len(row) for row in features)
    if len(widths) > 1:
        raise GraphFormatError("Rows of {} have differing attribute counts {}".format(
            content_path, sorted(widths)), path=content_path)

    _, label_ids = np.unique(np.array(labels), return_inverse=True)
    graph = Graph.from_edges(len(ids), edges)
    dataset = NodeDataset(graph, np.array(features, dtype=np.float64).reshape(len(ids), -1),
                          label_ids, name=name)
    _LOGGER.info("Loaded LINQS %s", dataset)
    return dataset

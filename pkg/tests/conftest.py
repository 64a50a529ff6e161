# Copyright (C) 2021 The fea2fea Authors. All Rights Reserved.
#
#     File:    conftest.py
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
from fea2fea.graph import Graph, GraphCollection, NodeDataset, generate_random_geometric

#
# Fixtures
#


@pytest.fixture
def path3():
    """0 - 1 - 2"""
    return Graph.from_edges(3, [(0, 1), (1, 2)])


@pytest.fixture
def triangle():
    """K3"""
    return Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def two_edges():
    """Two disjoint edges on four nodes"""
    return Graph.from_edges(4, [(0, 1), (2, 3)])


@pytest.fixture
def small_random_graphs():
    """100+ seeded random graphs with 1 to 12 nodes, isolated nodes included"""
    rng = np.random.default_rng(2021)
    graphs = []
    for _ in range(120):
        n = int(rng.integers(1, 13))
        density = rng.uniform(0.1, 0.7)
        pairs = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < density]
        graphs.append(Graph.from_edges(n, pairs))
    return graphs


@pytest.fixture
def geometric_dataset():
    """A labelled 60 node geometric graph, labels are the parity of the degree"""
    graph = generate_random_geometric(60, 0.3, seed=5)
    labels = graph.degrees() % 2
    features = np.random.default_rng(5).normal(size=(60, 3))
    return NodeDataset(graph, features, labels, name='geometric-60')


@pytest.fixture
def small_collection():
    """Twelve small graphs: paths are class 0, cliques class 1"""
    graphs, labels = [], []
    for n in range(3, 9):
        graphs.append(Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)]))
        labels.append(0)
        graphs.append(Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)]))
        labels.append(1)
    return GraphCollection(graphs, labels, name='paths-and-cliques')

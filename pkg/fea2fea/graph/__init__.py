# Copyright (C) 2021 The fea2fea Authors. All Rights Reserved.
#
#     File:    __init__.py
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

from ._graph import Graph, GraphBatch, GraphCollection, NodeDataset
from ._loaders import (load_edge_list, save_edge_list, read_edge_list_header,
                       load_tudataset, load_linqs)
from ._generators import (generate_random_geometric, generate_geometric_collection,
                          default_radius)
from ._splits import node_split, planetoid_split, graph_split, kfold, split_sizes

__all__ = ['Graph', 'GraphBatch', 'GraphCollection', 'NodeDataset',
           'load_edge_list', 'save_edge_list', 'read_edge_list_header',
           'load_tudataset', 'load_linqs',
           'generate_random_geometric', 'generate_geometric_collection', 'default_radius',
           'node_split', 'planetoid_split', 'graph_split', 'kfold', 'split_sizes']

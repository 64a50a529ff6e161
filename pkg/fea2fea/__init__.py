# Copyright (C) 2021 The fea2fea Authors. All Rights Reserved.
#
#     File:    __init__.py
#     Author:  fea2fea developers
#     Date:    2021-06-01
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
Root module of the ``fea2fea`` library.

Structural node features of a graph (constant, degree, clustering
coefficient, PageRank and average shortest path length) are predicted
from one another with graph neural networks.  The resulting accuracy
matrix exposes redundant features; the irredundant ones augment the
input of node and graph classifiers.
"""

__version__ = '0.1.0'

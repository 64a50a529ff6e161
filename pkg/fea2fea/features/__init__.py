# Copyright (C) 2021 The fea2fea Authors. All Rights Reserved.
#
#     File:    __init__.py
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

from .structural import (FEATURE_NAMES, CONS, DEG, CLU, PR, AVGLEN, NodeFeatureMatrix,
                         feature_index, constant_feature, degree, clustering_coefficient,
                         pagerank, average_path_length, build_feature_matrix,
                         build_collection_features, feature_histograms, read_feature_matrix)
from .binning import (BinningSpec, fit_bins, apply_bins, default_specs,
                      EQUAL_WIDTH, EQUAL_FREQUENCY, ZERO_INFLATED, STRATEGIES)

__all__ = ['FEATURE_NAMES', 'CONS', 'DEG', 'CLU', 'PR', 'AVGLEN', 'NodeFeatureMatrix',
           'feature_index', 'constant_feature', 'degree', 'clustering_coefficient', 'pagerank',
           'average_path_length', 'build_feature_matrix', 'build_collection_features',
           'feature_histograms', 'read_feature_matrix', 'BinningSpec', 'fit_bins', 'apply_bins',
           'default_specs',
           'EQUAL_WIDTH', 'EQUAL_FREQUENCY', 'ZERO_INFLATED', 'STRATEGIES']

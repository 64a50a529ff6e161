# Copyright (C) 2021 The fea2fea Authors. All Rights Reserved.
#
#     File:    __init__.py
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
Feature prediction pipelines and their downstream application
"""

from .base import PreparedData, prepare_data, standardise, NODE_MODE, GRAPH_MODE
from .single import (PairTask, PairOutcome, CorrelationMatrix, train_pair, run_pair, evaluate_pair,
                     build_correlation_matrix, binning_for)
from .concat import (SIMPLE, BILINEAR, NTN, CONCAT_METHODS, NtnParams, concat_simple,
                     concat_bilinear, concat_ntn, concat_embeddings)
from .multiple import (FeatureCombination, CombinationResult, CombinationEncoder, CombinationModel,
                       enumerate_combinations, filter_combinations, train_multi, run_multiple,
                       run_multiple_jobs, summarize, summary_rows)
from .application import (AugmentConfig, ClassificationReport, augment_features, model_inputs,
                          classify, classify_nodes, classify_graphs, write_report)

__all__ = ['PreparedData', 'prepare_data', 'standardise', 'NODE_MODE', 'GRAPH_MODE',
           'PairTask', 'PairOutcome', 'CorrelationMatrix', 'train_pair', 'run_pair',
           'evaluate_pair', 'build_correlation_matrix', 'binning_for',
           'SIMPLE', 'BILINEAR', 'NTN', 'CONCAT_METHODS', 'NtnParams', 'concat_simple',
           'concat_bilinear', 'concat_ntn', 'concat_embeddings',
           'FeatureCombination', 'CombinationResult', 'CombinationEncoder', 'CombinationModel',
           'enumerate_combinations', 'filter_combinations', 'train_multi', 'run_multiple',
           'run_multiple_jobs', 'summarize', 'summary_rows',
           'AugmentConfig', 'ClassificationReport', 'augment_features', 'model_inputs',
           'classify', 'classify_nodes', 'classify_graphs', 'write_report']

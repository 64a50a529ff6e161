# Copyright (C) 2021 The fea2fea Authors. All Rights Reserved.
#
#     File:    __init__.py
#     Author:  fea2fea developers
#     Date:    2021-06-07
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
A small numpy tensor engine with reverse-mode differentiation and the
graph layers the prediction models are built from
"""

from ._tensor import Tensor, Parameter, Tape, active_tape
from . import _ops as ops
from ._layers import (Module, Linear, BatchNorm, MLP, GCNConv, GINConv, SAGEConv, GATConv,
                      CONV_TYPES, make_conv, glorot_uniform, gcn_propagation, mean_propagation)
from ._optim import Adam, adam_step
from ._checkpoint import save_checkpoint, load_checkpoint, read_checkpoint, FORMAT_VERSION
from .model import (LayerConfig, GNNStack, Fea2FeaModel, build_model, forward, seeded_generators,
                    MODEL_TYPES, CONV_MLP)
from .training import (TrainConfig, Trainer, TrainResult, PatienceIterator, accuracy, predict)

__all__ = ['Tensor', 'Parameter', 'Tape', 'active_tape', 'ops',
           'Module', 'Linear', 'BatchNorm', 'MLP', 'GCNConv', 'GINConv', 'SAGEConv', 'GATConv',
           'CONV_TYPES', 'make_conv', 'glorot_uniform', 'gcn_propagation', 'mean_propagation',
           'Adam', 'adam_step', 'save_checkpoint', 'load_checkpoint', 'read_checkpoint',
           'FORMAT_VERSION', 'LayerConfig', 'GNNStack', 'Fea2FeaModel', 'build_model', 'forward',
           'seeded_generators', 'MODEL_TYPES', 'CONV_MLP',
           'TrainConfig', 'Trainer', 'TrainResult', 'PatienceIterator', 'accuracy', 'predict']

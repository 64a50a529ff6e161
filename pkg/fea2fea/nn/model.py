# Copyright (C) 2021 The fea2fea Authors. All Rights Reserved.
#
#     File:    model.py
#     Author:  fea2fea developers
#     Date:    2021-06-09
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
Model configuration and the feature prediction network

A prediction model is ``depth`` graph convolution blocks followed by a two
layer MLP head and a log-softmax.  Each block is
conv -> [batchnorm] -> relu -> dropout, and with skip connections every
block after the first adds its own input back.  The ``MLP`` conv type
swaps the convolutions for dense layers and ignores the graph.
"""

import logging

# Third Party
import numpy as np

# This project
from fea2fea.exceptions import ConfigurationError
from . import _ops as ops
from ._layers import Module, Linear, BatchNorm, MLP, make_conv, CONV_TYPES

_LOGGER = logging.getLogger(__name__)

CONV_MLP = 'MLP'
MODEL_TYPES = tuple(sorted(CONV_TYPES)) + (CONV_MLP,)


class LayerConfig(object):
    """Architecture of a prediction model

    Attributes:
        conv_type (str): GCN, GIN, SAGE, GAT or MLP
        in_dim (int): Input width
        hidden_dim (int): Width of every hidden layer
        out_dim (int): Number of classes
        depth (int): Number of convolution blocks
        dropout_p (float): Dropout probability after every block
        use_batchnorm (bool): Normalise after every convolution
        use_skip (bool): Residual connections from the second block on
    """

    DEFAULT_CONV_TYPE = 'GCN'
    """Default convolution"""

    DEFAULT_IN_DIM = 1
    """Default input width, one feature column"""

    DEFAULT_HIDDEN_DIM = 64
    """Default hidden embedding size"""

    DEFAULT_OUT_DIM = 6
    """Default class count, the default number of bins"""

    DEFAULT_DEPTH = 2
    """Default number of convolution blocks"""

    DEFAULT_DROPOUT = 0.0
    """Default dropout probability"""

    def __init__(self, conv_type=None, in_dim=None, hidden_dim=None, out_dim=None, depth=None,
                 dropout_p=None, use_batchnorm=None, use_skip=None):
        """Constructor

        Arguments left as None take the matching ``DEFAULT_*`` value;
        batchnorm and skip connections default to off.

        Raises:
            ConfigurationError: Unknown conv type, depth < 1, dropout outside [0, 1)
                or a non-positive width
        """
        if conv_type is None:
            conv_type = LayerConfig.DEFAULT_CONV_TYPE
        conv_type = str(conv_type).upper()
        if conv_type not in MODEL_TYPES:
            raise ConfigurationError("Unknown conv type '{}', expected one of {}".format(
                conv_type, ", ".join(MODEL_TYPES)))
        self.conv_type = conv_type

        self.in_dim = int(LayerConfig.DEFAULT_IN_DIM if in_dim is None else in_dim)
        self.hidden_dim = int(LayerConfig.DEFAULT_HIDDEN_DIM if hidden_dim is None else hidden_dim)
        self.out_dim = int(LayerConfig.DEFAULT_OUT_DIM if out_dim is None else out_dim)
        if min(self.in_dim, self.hidden_dim, self.out_dim) < 1:
            raise ConfigurationError("Layer widths must be positive, got in={} hidden={} out={}".format(
                self.in_dim, self.hidden_dim, self.out_dim))

        self.depth = int(LayerConfig.DEFAULT_DEPTH if depth is None else depth)
        if self.depth < 1:
            raise ConfigurationError("Depth must be at least 1, got {}".format(self.depth))

        self.dropout_p = float(LayerConfig.DEFAULT_DROPOUT if dropout_p is None else dropout_p)
        if not 0 <= self.dropout_p < 1:
            raise ConfigurationError("Dropout must lie in [0, 1), got {}".format(self.dropout_p))

        self.use_batchnorm = bool(use_batchnorm)
        self.use_skip = bool(use_skip)

    def replace(self, **changes):
        """ Copy with some fields changed """
        values = self.to_dict()
        values.update(changes)
        return LayerConfig(**values)

    def to_dict(self):
        """ JSON-ready representation """
        return {
            'conv_type': self.conv_type,
            'in_dim': self.in_dim,
            'hidden_dim': self.hidden_dim,
            'out_dim': self.out_dim,
            'depth': self.depth,
            'dropout_p': self.dropout_p,
            'use_batchnorm': self.use_batchnorm,
            'use_skip': self.use_skip,
        }

    def __eq__(self, other):
        if not isinstance(other, LayerConfig):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def __ne__(self, other):
        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    __hash__ = None

    def __repr__(self):
        return "<{} {} depth={} hidden={}>".format(self.__class__.__name__, self.conv_type,
                                                  self.depth, self.hidden_dim)


def seeded_generators(seed):
    """ Independent (initialisation, dropout) generators for one model """
    init_seq, dropout_seq = np.random.SeedSequence(int(seed)).spawn(2)
    return np.random.default_rng(init_seq), np.random.default_rng(dropout_seq)


class GNNStack(Module):
    """ depth convolution blocks from in_dim to hidden_dim """

    def __init__(self, cfg, in_dim, init_rng, dropout_rng):
        super(GNNStack, self).__init__()
        self.conv_type = cfg.conv_type
        self.dropout_p = cfg.dropout_p
        self.use_skip = cfg.use_skip
        self._dropout_rng = dropout_rng

        dims = [in_dim] + [cfg.hidden_dim] * cfg.depth
        if cfg.conv_type == CONV_MLP:
            self.layers = [Linear(dims[i], dims[i + 1], init_rng) for i in range(cfg.depth)]
        else:
            self.layers = [make_conv(cfg.conv_type, dims[i], dims[i + 1], init_rng)
                           for i in range(cfg.depth)]
        self.norms = [BatchNorm(cfg.hidden_dim) for _ in range(cfg.depth)] if cfg.use_batchnorm else []

    def forward(self, x, graph):
        h = x
        for index, layer in enumerate(self.layers):
            out = layer(h) if self.conv_type == CONV_MLP else layer(h, graph)
            if self.norms:
                out = self.norms[index](out)
            out = ops.dropout(ops.relu(out), self.dropout_p, self.training, self._dropout_rng)
            h = ops.add(h, out) if self.use_skip and index > 0 else out
        return h


class Fea2FeaModel(Module):
    """
    Convolution stack, optional graph readout, two layer MLP head, log-softmax
    """

    def __init__(self, cfg, seed):
        super(Fea2FeaModel, self).__init__()
        self.config = cfg
        init_rng, dropout_rng = seeded_generators(seed)
        self.stack = GNNStack(cfg, cfg.in_dim, init_rng, dropout_rng)
        self.head = MLP(cfg.hidden_dim, cfg.hidden_dim, cfg.out_dim, init_rng)

    def embed(self, graph, x, pooling=None):
        """ Activations entering the head; pooled to graph rows when pooling is given """
        h = self.stack(x, graph)
        return h if pooling is None else ops.spmm(pooling, h)

    def forward(self, graph, x, pooling=None):
        return ops.log_softmax(self.head(self.embed(graph, x, pooling)), axis=1)


def build_model(cfg, seed):
    """ Seeded prediction model for cfg

    Two calls with the same cfg and seed give bitwise identical parameters.
    """
    model = Fea2FeaModel(cfg, seed)
    _LOGGER.debug("Built %r with %s parameters (seed %s)", cfg, model.num_parameters(), seed)
    return model


def forward(model, graph, x, train_flag, pooling=None):
    """ Run model in training or evaluation mode and return log-probabilities """
    model.train(train_flag)
    return model(graph, x, pooling)

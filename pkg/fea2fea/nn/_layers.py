# Copyright (C) 2021 The fea2fea Authors. All Rights Reserved.
#
#     File:    _layers.py
#     Author:  fea2fea developers
#     Date:    2021-06-08
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
Trainable layers: dense, the four graph convolutions, batch normalisation
"""

import logging

# Third Party
import numpy as np
import scipy.sparse as sp

# This project
from fea2fea.exceptions import EngineException
from . import _ops as ops
from ._tensor import Parameter

_LOGGER = logging.getLogger(__name__)


def glorot_uniform(rng, fan_in, fan_out, shape=None):
    """ Uniform(-a, a) with a = sqrt(6 / (fan_in + fan_out)) """

    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out) if shape is None else shape)


class Module(object):
    """
    Base class of everything that owns parameters

    Parameters, buffers and sub-modules are discovered from the instance
    attributes in assignment order, which gives every parameter a stable
    dotted name such as ``convs.1.weight``.
    """

    def __init__(self):
        self.training = True

    def __call__(self, *args, **kwargs):
        return self.forward(*args, **kwargs)

    def forward(self, *args, **kwargs):
        """ Compute the module output """
        raise NotImplementedError()

    def _children(self):
        for name, value in vars(self).items():
            if isinstance(value, Module):
                yield name, value
            elif isinstance(value, (list, tuple)):
                for index, item in enumerate(value):
                    if isinstance(item, Module):
                        yield "{}.{}".format(name, index), item

    def named_parameters(self, prefix=''):
        """ (dotted name, Parameter) pairs, own parameters first """
        for name, value in vars(self).items():
            if isinstance(value, Parameter):
                yield prefix + name, value
        for name, child in self._children():
            for item in child.named_parameters(prefix + name + '.'):
                yield item

    def parameters(self):
        """ All parameters in :meth:`named_parameters` order """
        return [parameter for _, parameter in self.named_parameters()]

    def named_buffers(self, prefix=''):
        """ Non-trainable state arrays, e.g. running statistics """
        for name in getattr(self, '_buffers', ()):
            yield prefix + name, getattr(self, name)
        for name, child in self._children():
            for item in child.named_buffers(prefix + name + '.'):
                yield item

    def train(self, mode=True):
        """ Switch this module and its children to training mode """
        self.training = bool(mode)
        for _, child in self._children():
            child.train(mode)
        return self

    def eval(self):
        """ Switch to evaluation mode """
        return self.train(False)

    def zero_grad(self):
        """ Forget all accumulated gradients """
        for parameter in self.parameters():
            parameter.zero_grad()

    def state_dict(self):
        """ Copies of every parameter and buffer by name """
        state = dict((name, p.data.copy()) for name, p in self.named_parameters())
        state.update((name, b.copy()) for name, b in self.named_buffers())
        return state

    def load_state_dict(self, state):
        """ Overwrite parameters and buffers in place

        Raises:
            EngineException: Missing names or mismatched shapes
        """
        targets = dict((name, p.data) for name, p in self.named_parameters())
        targets.update(self.named_buffers())
        missing = sorted(set(targets) - set(state))
        if missing:
            raise EngineException("State is missing {}".format(", ".join(missing)))
        for name, target in targets.items():
            value = np.asarray(state[name], dtype=np.float64)
            if value.shape != target.shape:
                raise EngineException("Shape of '{}' is {}, state has {}".format(
                    name, target.shape, value.shape))
            target[...] = value

    def num_parameters(self):
        """ Total number of trainable scalars """
        return int(np.sum([p.size for p in self.parameters()]))


class Linear(Module):
    """ x W + b, with W Glorot uniform and b uniform in +-1/sqrt(in_dim) """

    def __init__(self, in_dim, out_dim, rng, bias=True):
        super(Linear, self).__init__()
        self.in_dim = in_dim
        self.out_dim = out_dim
        self.weight = Parameter(glorot_uniform(rng, in_dim, out_dim))
        bound = 1.0 / np.sqrt(in_dim)
        self.bias = Parameter(rng.uniform(-bound, bound, size=out_dim)) if bias else None

    def forward(self, x):
        out = ops.matmul(x, self.weight)
        return out if self.bias is None else ops.add(out, self.bias)


class BatchNorm(Module):
    """ Column normalisation with learnable scale and shift """

    MOMENTUM = 0.1
    EPS = 1e-5

    def __init__(self, num_features):
        super(BatchNorm, self).__init__()
        self.gamma = Parameter(np.ones(num_features))
        self.beta = Parameter(np.zeros(num_features))
        self.running_mean = np.zeros(num_features)
        self.running_var = np.ones(num_features)
        self._buffers = ('running_mean', 'running_var')

    def forward(self, x):
        return ops.batchnorm(x, self.gamma, self.beta, self.running_mean, self.running_var,
                             self.training, BatchNorm.MOMENTUM, BatchNorm.EPS)


class MLP(Module):
    """ Two dense layers with a relu between them """

    def __init__(self, in_dim, hidden_dim, out_dim, rng):
        super(MLP, self).__init__()
        self.first = Linear(in_dim, hidden_dim, rng)
        self.second = Linear(hidden_dim, out_dim, rng)

    def forward(self, x):
        return self.second(ops.relu(self.first(x)))


#
# Propagation matrices, cached per graph
#
def gcn_propagation(graph):
    """ D^-1/2 (A + I) D^-1/2 with D the degree matrix of A + I """

    def build(g):
        looped = g.adjacency() + sp.identity(g.num_nodes, format='csr')
        scale = 1.0 / np.sqrt(np.asarray(looped.sum(axis=1)).ravel())
        return sp.csr_matrix(sp.diags(scale) @ looped @ sp.diags(scale))

    return graph.cached('gcn', build)


def mean_propagation(graph):
    """ Row normalised adjacency; rows of isolated nodes stay zero """

    def build(g):
        degrees = g.degrees().astype(np.float64)
        inverse = np.zeros_like(degrees)
        inverse[degrees > 0] = 1.0 / degrees[degrees > 0]
        return sp.csr_matrix(sp.diags(inverse) @ g.adjacency())

    return graph.cached('mean', build)


def self_loop_edges(graph):
    """ (target, source) arrays over every edge in both directions plus u -> u """

    def build(g):
        sources = np.repeat(np.arange(g.num_nodes), np.diff(g.offsets))
        loops = np.arange(g.num_nodes)
        return (np.concatenate([sources, loops]), np.concatenate([g.neighbors, loops]))

    return graph.cached('self-loop-edges', build)


class GCNConv(Module):
    """ x' = D^-1/2 (A + I) D^-1/2 x W + b """

    def __init__(self, in_dim, out_dim, rng):
        super(GCNConv, self).__init__()
        self.linear = Linear(in_dim, out_dim, rng)

    def forward(self, x, graph):
        return ops.add(ops.spmm(gcn_propagation(graph), ops.matmul(x, self.linear.weight)),
                       self.linear.bias)


class GINConv(Module):
    """ x' = MLP((1 + eps) x + sum of neighbor rows) """

    def __init__(self, in_dim, out_dim, rng, eps=0.0):
        super(GINConv, self).__init__()
        self.eps = float(eps)
        self.mlp = MLP(in_dim, out_dim, out_dim, rng)

    def aggregate(self, x, graph):
        """ The pre-MLP sum """
        return ops.add(ops.mul(x, 1.0 + self.eps), ops.spmm(graph.adjacency(), x))

    def forward(self, x, graph):
        return self.mlp(self.aggregate(x, graph))


class SAGEConv(Module):
    """ x' = x W_self + mean(neighbor rows) W_neigh + b """

    def __init__(self, in_dim, out_dim, rng):
        super(SAGEConv, self).__init__()
        self.self_linear = Linear(in_dim, out_dim, rng)
        self.neighbor_linear = Linear(in_dim, out_dim, rng, bias=False)

    def forward(self, x, graph):
        neighbors = ops.spmm(mean_propagation(graph), x)
        return ops.add(self.self_linear(x), self.neighbor_linear(neighbors))


class GATConv(Module):
    """
    Single head graph attention

    alpha_uv = softmax over v in N(u) + {u} of
    leaky_relu(a_self . W x_u + a_neighbor . W x_v), and
    x'_u = sum_v alpha_uv W x_v + b.
    """

    SLOPE = 0.2

    def __init__(self, in_dim, out_dim, rng, slope=None):
        super(GATConv, self).__init__()
        self.slope = GATConv.SLOPE if slope is None else float(slope)
        self.weight = Parameter(glorot_uniform(rng, in_dim, out_dim))
        self.attention_self = Parameter(glorot_uniform(rng, out_dim, 1))
        self.attention_neighbor = Parameter(glorot_uniform(rng, out_dim, 1))
        self.bias = Parameter(np.zeros(out_dim))

    def attention(self, x, graph):
        """ (targets, sources, alpha, W x) with alpha an (E, 1) tensor """
        targets, sources = self_loop_edges(graph)
        h = ops.matmul(x, self.weight)
        scores = ops.add(ops.gather_rows(ops.matmul(h, self.attention_self), targets),
                         ops.gather_rows(ops.matmul(h, self.attention_neighbor), sources))
        alpha = ops.segment_softmax(ops.leaky_relu(scores, self.slope), targets, graph.num_nodes)
        return targets, sources, alpha, h

    def forward(self, x, graph):
        targets, sources, alpha, h = self.attention(x, graph)
        messages = ops.mul(alpha, ops.gather_rows(h, sources))
        return ops.add(ops.scatter_sum(messages, targets, graph.num_nodes), self.bias)


CONV_TYPES = {
    'GCN': GCNConv,
    'GIN': GINConv,
    'SAGE': SAGEConv,
    'GAT': GATConv,
}
"""Graph convolution class per LayerConfig conv_type"""


def make_conv(conv_type, in_dim, out_dim, rng):
    """ Instantiate a graph convolution by name """
    try:
        return CONV_TYPES[conv_type](in_dim, out_dim, rng)
    except KeyError:
        raise EngineException("Unknown convolution '{}', expected one of {}".format(
            conv_type, ", ".join(sorted(CONV_TYPES))))

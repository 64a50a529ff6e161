# Copyright (C) 2021 The fea2fea Authors. All Rights Reserved.
#
#     File:    concat.py
#     Author:  fea2fea developers
#     Date:    2021-06-16
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
Combining k feature embeddings of width d into one vector of width k * d

simple
    e_1 ⊕ e_2 ⊕ ... ⊕ e_k

bilinear
    g_1 = e_1, g_t = tanh(g_{t-1}^T W_t e_t + b_t)

ntn
    g_1 = e_1, g_t = tanh(g_{t-1}^T W_t e_t + (g_{t-1} ⊕ e_t) + b_t) u_t

W_t has shape ((t-1) d, d, t d), b_t has t d entries and u_t is a
t d x t d map applied to the activation as a row vector.  Every function
works row-wise on N x d embeddings; 1-d vectors are treated as a single
row and come back 1-d.
"""

import logging

# Third Party
import numpy as np

# This project
from fea2fea.exceptions import ShapeError, CombinationError
from fea2fea.nn import Module, Parameter, glorot_uniform, ops
from fea2fea.nn._tensor import as_tensor

LOGGER = logging.getLogger(__name__)

SIMPLE = 'simple'
BILINEAR = 'bilinear'
NTN = 'ntn'
CONCAT_METHODS = (SIMPLE, BILINEAR, NTN)


class NtnStep(Module):
    """ Parameters of recurrence step t """

    def __init__(self, weight, bias, u):
        super(NtnStep, self).__init__()
        self.weight = Parameter(weight)
        self.bias = Parameter(bias)
        self.u = Parameter(u)


class NtnParams(Module):
    """
    Weights of the bilinear and NTN recurrences for up to max_k embeddings

    Attributes:
        embed_dim (int): d
        steps (list): NtnStep for t = 2..max_k
    """

    def __init__(self, embed_dim, steps):
        super(NtnParams, self).__init__()
        self.embed_dim = int(embed_dim)
        self.steps = list(steps)
        for t, step in enumerate(self.steps, start=2):
            expected = ((t - 1) * embed_dim, embed_dim, t * embed_dim)
            if (step.weight.shape != expected or step.bias.shape != (t * embed_dim,) or
                    step.u.shape != (t * embed_dim, t * embed_dim)):
                raise ShapeError("Step {} parameters do not fit d={}".format(t, embed_dim),
                                 step.weight.shape, expected)

    @property
    def max_k(self):
        """ Largest number of embeddings these parameters combine """
        return len(self.steps) + 1

    @classmethod
    def initialise(cls, embed_dim, max_k, rng):
        """ Glorot uniform tensors, zero biases and identity u """
        d = embed_dim
        steps = []
        for t in range(2, max_k + 1):
            weight = glorot_uniform(rng, t * d, t * d, shape=((t - 1) * d, d, t * d))
            steps.append(NtnStep(weight, np.zeros(t * d), np.eye(t * d)))
        return cls(d, steps)

    @classmethod
    def zeros(cls, embed_dim, max_k, identity_u=True):
        """ All zero tensors and biases; u is the identity unless told otherwise """
        d = embed_dim
        steps = []
        for t in range(2, max_k + 1):
            u = np.eye(t * d) if identity_u else np.zeros((t * d, t * d))
            steps.append(NtnStep(np.zeros(((t - 1) * d, d, t * d)), np.zeros(t * d), u))
        return cls(d, steps)

    def forward(self, embeddings):
        return concat_ntn(embeddings, self)


def _as_rows(embeddings):
    """ Tensors of shape N x d, and whether the inputs were 1-d """
    if not embeddings:
        raise CombinationError("Nothing to concatenate")
    tensors = [as_tensor(e) for e in embeddings]
    vectors = all(t.ndim == 1 for t in tensors)
    if vectors:
        tensors = [ops.reshape(t, (1, t.shape[0])) for t in tensors]
    width = tensors[0].shape
    for tensor in tensors[1:]:
        if tensor.ndim != 2 or tensor.shape != width:
            raise ShapeError("Embeddings {} and {} differ".format(width, tensor.shape),
                             width, tensor.shape)
    return tensors, vectors


def _restore(tensor, vectors):
    return ops.reshape(tensor, (tensor.shape[1],)) if vectors else tensor


def concat_simple(embeddings):
    """ e_1 ⊕ ... ⊕ e_k in member order """
    tensors, vectors = _as_rows(embeddings)
    return _restore(ops.concat(tensors, axis=1), vectors)


def _recurrence(embeddings, params, with_direct):
    tensors, vectors = _as_rows(embeddings)
    if len(tensors) > params.max_k:
        raise CombinationError("Parameters cover {} embeddings, got {}".format(
            params.max_k, len(tensors)))
    if tensors[0].shape[1] != params.embed_dim:
        raise ShapeError("Embedding width {} does not match d={}".format(
            tensors[0].shape[1], params.embed_dim), tensors[0].shape, (params.embed_dim,))

    g = tensors[0]
    for step, e in zip(params.steps, tensors[1:]):
        z = ops.bilinear(g, step.weight, e)
        if with_direct:
            z = ops.add(z, ops.concat([g, e], axis=1))
        g = ops.tanh(ops.add(z, step.bias))
        if with_direct:
            g = ops.matmul(g, step.u)
    return _restore(g, vectors)


def concat_bilinear(embeddings, params):
    """ Bilinear recurrence without the direct concatenation term """
    return _recurrence(embeddings, params, with_direct=False)


def concat_ntn(embeddings, params):
    """ Full neural tensor recurrence

    Raises:
        ShapeError: Embeddings of different widths or not of width d
    """
    return _recurrence(embeddings, params, with_direct=True)


def concat_embeddings(method, embeddings, params=None):
    """ Dispatch on the method name """
    if method == SIMPLE:
        return concat_simple(embeddings)
    if method == BILINEAR:
        return concat_bilinear(embeddings, params)
    if method == NTN:
        return concat_ntn(embeddings, params)
    raise CombinationError("Unknown concatenation '{}', expected one of {}".format(
        method, ", ".join(CONCAT_METHODS)))

# Copyright (C) 2021 The fea2fea Authors. All Rights Reserved.
#
#     File:    _ops.py
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
Differentiable tensor operations

Every function takes :class:`~fea2fea.nn.Tensor` operands (arrays and
scalars are wrapped as constants), computes the forward value with numpy
and, when a tape is recording, registers a closure that accumulates the
exact gradient into each operand that requires one.
"""

import logging

# Third Party
import numpy as np

# This project
from fea2fea.exceptions import ShapeError, TargetRangeError
from ._tensor import Tape, Tensor, as_tensor, make_result

_LOGGER = logging.getLogger(__name__)


def _shape_error(message, left, right):
    _LOGGER.error(message)
    return ShapeError(message, left, right)


def _broadcast_shape(name, a, b):
    try:
        return np.broadcast_shapes(a.shape, b.shape)
    except ValueError:
        raise _shape_error("{}: shapes {} and {} do not broadcast".format(name, a.shape, b.shape),
                           a.shape, b.shape)


def unbroadcast(grad, shape):
    """ Sum grad down to shape, undoing numpy broadcasting """

    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


#
# Arithmetic
#
def add(a, b):
    """ a + b with broadcasting """
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape('add', a, b)

    def backward(grad):
        if a.requires_grad:
            a.accumulate(unbroadcast(grad, a.shape))
        if b.requires_grad:
            b.accumulate(unbroadcast(grad, b.shape))

    return make_result(a.data + b.data, (a, b), backward)


def sub(a, b):
    """ a - b with broadcasting """
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape('sub', a, b)

    def backward(grad):
        if a.requires_grad:
            a.accumulate(unbroadcast(grad, a.shape))
        if b.requires_grad:
            b.accumulate(unbroadcast(-grad, b.shape))

    return make_result(a.data - b.data, (a, b), backward)


def mul(a, b):
    """ Elementwise a * b with broadcasting """
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape('mul', a, b)

    def backward(grad):
        if a.requires_grad:
            a.accumulate(unbroadcast(grad * b.data, a.shape))
        if b.requires_grad:
            b.accumulate(unbroadcast(grad * a.data, b.shape))

    return make_result(a.data * b.data, (a, b), backward)


def matmul(a, b):
    """ (n x k) @ (k x m) """
    a, b = as_tensor(a), as_tensor(b)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise _shape_error("matmul: cannot multiply {} by {}".format(a.shape, b.shape),
                           a.shape, b.shape)

    def backward(grad):
        if a.requires_grad:
            a.accumulate(grad @ b.data.T)
        if b.requires_grad:
            b.accumulate(a.data.T @ grad)

    return make_result(a.data @ b.data, (a, b), backward)


#
# Activations
#
def relu(x):
    """ max(x, 0) """
    x = as_tensor(x)
    mask = x.data > 0

    def backward(grad):
        x.accumulate(grad * mask)

    return make_result(x.data * mask, (x,), backward)


def leaky_relu(x, slope=0.01):
    """ x for x > 0, slope * x otherwise """
    x = as_tensor(x)
    factor = np.where(x.data > 0, 1.0, slope)

    def backward(grad):
        x.accumulate(grad * factor)

    return make_result(x.data * factor, (x,), backward)


def tanh(x):
    """ Hyperbolic tangent """
    x = as_tensor(x)
    out = np.tanh(x.data)

    def backward(grad):
        x.accumulate(grad * (1.0 - out * out))

    return make_result(out, (x,), backward)


#
# Shape
#
def concat(tensors, axis=-1):
    """ Join tensors along axis; the other dimensions must agree """
    tensors = [as_tensor(t) for t in tensors]
    if not tensors:
        raise ShapeError("concat: nothing to concatenate")

    first = tensors[0]
    axis = axis % first.ndim
    for other in tensors[1:]:
        if other.ndim != first.ndim or any(
                other.shape[i] != first.shape[i] for i in range(first.ndim) if i != axis):
            raise _shape_error("concat: shapes {} and {} differ off axis {}".format(
                first.shape, other.shape, axis), first.shape, other.shape)

    splits = np.cumsum([t.shape[axis] for t in tensors])[:-1]

    def backward(grad):
        for tensor, part in zip(tensors, np.split(grad, splits, axis=axis)):
            if tensor.requires_grad:
                tensor.accumulate(part)

    return make_result(np.concatenate([t.data for t in tensors], axis=axis), tuple(tensors), backward)


def reshape(x, shape):
    """ Same values, new shape """
    x = as_tensor(x)
    try:
        out = x.data.reshape(shape)
    except ValueError:
        raise _shape_error("reshape: cannot view {} as {}".format(x.shape, shape), x.shape, shape)

    def backward(grad):
        x.accumulate(grad.reshape(x.shape))

    return make_result(out, (x,), backward)


def gather_rows(x, index):
    """ x[index] along the first axis; repeated indices accumulate """
    x = as_tensor(x)
    index = np.asarray(index)
    if index.dtype == np.bool_:
        index = np.flatnonzero(index)
    index = index.astype(np.int64)

    def backward(grad):
        full = np.zeros_like(x.data)
        np.add.at(full, index, grad)
        x.accumulate(full)

    return make_result(x.data[index], (x,), backward)


def scatter_sum(x, index, num_segments):
    """ Row i of x is added into output row index[i] """
    x = as_tensor(x)
    index = np.asarray(index, dtype=np.int64)
    if index.shape[0] != x.shape[0]:
        raise _shape_error("scatter_sum: {} rows but {} indices".format(x.shape[0], index.shape[0]),
                           x.shape, index.shape)

    out = np.zeros((num_segments,) + x.shape[1:])
    np.add.at(out, index, x.data)

    def backward(grad):
        x.accumulate(grad[index])

    return make_result(out, (x,), backward)


#
# Reductions
#
def _expand(grad, shape, axis, keepdims):
    if axis is not None and not keepdims:
        grad = np.expand_dims(grad, axis)
    return np.broadcast_to(grad, shape)


def sum(x, axis=None, keepdims=False):  # pylint: disable=redefined-builtin
    """ Sum over axis, all elements by default """
    x = as_tensor(x)

    def backward(grad):
        x.accumulate(np.array(_expand(grad, x.shape, axis, keepdims)))

    return make_result(np.sum(x.data, axis=axis, keepdims=keepdims), (x,), backward)


def mean(x, axis=None, keepdims=False):
    """ Mean over axis, all elements by default """
    x = as_tensor(x)
    count = x.size if axis is None else x.shape[axis]

    def backward(grad):
        x.accumulate(np.array(_expand(grad, x.shape, axis, keepdims)) / count)

    return make_result(np.mean(x.data, axis=axis, keepdims=keepdims), (x,), backward)


#
# Probabilities
#
def log_softmax(x, axis=-1):
    """ x - logsumexp(x) along axis """
    x = as_tensor(x)
    shifted = x.data - x.data.max(axis=axis, keepdims=True)
    out = shifted - np.log(np.exp(shifted).sum(axis=axis, keepdims=True))

    def backward(grad):
        x.accumulate(grad - np.exp(out) * grad.sum(axis=axis, keepdims=True))

    return make_result(out, (x,), backward)


def segment_softmax(scores, index, num_segments):
    """ Softmax of scores within groups of equal index

    Arguments:
        scores (Tensor): (E,) or (E, 1) scores
        index (numpy.ndarray): Group id per score
        num_segments (int): Number of groups
    """
    scores = as_tensor(scores)
    index = np.asarray(index, dtype=np.int64)
    flat = scores.data.reshape(scores.shape[0], -1)

    maxes = np.full((num_segments, flat.shape[1]), -np.inf)
    np.maximum.at(maxes, index, flat)
    exp = np.exp(flat - maxes[index])
    totals = np.zeros((num_segments, flat.shape[1]))
    np.add.at(totals, index, exp)
    alpha = (exp / totals[index]).reshape(scores.shape)

    def backward(grad):
        weighted = (alpha * grad).reshape(flat.shape)
        group = np.zeros((num_segments, flat.shape[1]))
        np.add.at(group, index, weighted)
        scores.accumulate(alpha * (grad - group[index].reshape(scores.shape)))

    return make_result(alpha, (scores,), backward)


def nll_loss(log_probs, targets):
    """ Mean of -log_probs[i, targets[i]]

    Raises:
        TargetRangeError: A target is outside of [0, C)
        ShapeError: log_probs is not N x C or targets is not length N
    """
    log_probs = as_tensor(log_probs)
    targets = np.asarray(targets, dtype=np.int64)
    if log_probs.ndim != 2 or targets.shape != (log_probs.shape[0],) or not targets.size:
        raise _shape_error("nll_loss: log-probabilities {} against targets {}".format(
            log_probs.shape, targets.shape), log_probs.shape, targets.shape)

    num_classes = log_probs.shape[1]
    if targets.min() < 0 or targets.max() >= num_classes:
        message = "nll_loss: targets must lie in [0, {}), got range [{}, {}]".format(
            num_classes, targets.min(), targets.max())
        _LOGGER.error(message)
        raise TargetRangeError(message)

    rows = np.arange(targets.shape[0])
    count = float(targets.shape[0])

    def backward(grad):
        full = np.zeros_like(log_probs.data)
        full[rows, targets] = -grad / count
        log_probs.accumulate(full)

    return make_result(-log_probs.data[rows, targets].mean(), (log_probs,), backward)


#
# Regularisation
#
def dropout(x, p, train_flag, rng):
    """ Zero entries with probability p and rescale the rest by 1 / (1 - p)

    With train_flag false, or p == 0, x is returned unchanged.
    """
    x = as_tensor(x)
    if not train_flag or p == 0:
        return x

    mask = (rng.random(x.shape) >= p) / (1.0 - p)

    def backward(grad):
        x.accumulate(grad * mask)

    return make_result(x.data * mask, (x,), backward)


def batchnorm(x, gamma, beta, running_mean, running_var, train_flag, momentum=0.1, eps=1e-5):
    """ Per column normalisation of an N x F tensor

    In training mode the batch statistics normalise x and the running
    estimates (updated in place) follow them with the given momentum.  In
    evaluation mode the running estimates are used.
    """
    x, gamma, beta = as_tensor(x), as_tensor(gamma), as_tensor(beta)
    if x.ndim != 2 or gamma.shape != (x.shape[1],) or beta.shape != (x.shape[1],):
        raise _shape_error("batchnorm: input {} with scale {}".format(x.shape, gamma.shape),
                           x.shape, gamma.shape)

    count = x.shape[0]
    if train_flag:
        centre = x.data.mean(axis=0)
        variance = x.data.var(axis=0)
        unbiased = variance * count / (count - 1) if count > 1 else variance
        running_mean *= 1.0 - momentum
        running_mean += momentum * centre
        running_var *= 1.0 - momentum
        running_var += momentum * unbiased
    else:
        centre, variance = running_mean.copy(), running_var.copy()

    inv_std = 1.0 / np.sqrt(variance + eps)
    normalised = (x.data - centre) * inv_std

    def backward(grad):
        if gamma.requires_grad:
            gamma.accumulate((grad * normalised).sum(axis=0))
        if beta.requires_grad:
            beta.accumulate(grad.sum(axis=0))
        if x.requires_grad:
            scaled = grad * gamma.data
            if train_flag:
                x.accumulate(inv_std / count * (count * scaled - scaled.sum(axis=0) -
                                                normalised * (scaled * normalised).sum(axis=0)))
            else:
                x.accumulate(scaled * inv_std)

    return make_result(normalised * gamma.data + beta.data, (x, gamma, beta), backward)


#
# Graph propagation and tensor contraction
#
def spmm(matrix, x):
    """ Constant scipy sparse matrix times a dense tensor """
    x = as_tensor(x)
    if matrix.shape[1] != x.shape[0]:
        raise _shape_error("spmm: sparse {} by dense {}".format(matrix.shape, x.shape),
                           matrix.shape, x.shape)

    def backward(grad):
        x.accumulate(np.asarray(matrix.T @ grad))

    return make_result(np.asarray(matrix @ x.data), (x,), backward)


def bilinear(g, weight, e):
    """ Row-wise g^T W e with a third order weight

    Arguments:
        g (Tensor): N x p
        weight (Tensor): p x d x q
        e (Tensor): N x d

    Returns:
        Tensor: N x q, out[n, k] = sum_ij g[n, i] W[i, j, k] e[n, j]
    """
    g, weight, e = as_tensor(g), as_tensor(weight), as_tensor(e)
    if (g.ndim != 2 or e.ndim != 2 or weight.ndim != 3 or g.shape[0] != e.shape[0] or
            weight.shape[0] != g.shape[1] or weight.shape[1] != e.shape[1]):
        raise _shape_error("bilinear: {} x {} x {} does not contract".format(
            g.shape, weight.shape, e.shape), g.shape, weight.shape)

    def backward(grad):
        if g.requires_grad:
            g.accumulate(np.einsum('nk,ijk,nj->ni', grad, weight.data, e.data, optimize=True))
        if weight.requires_grad:
            weight.accumulate(np.einsum('ni,nj,nk->ijk', g.data, e.data, grad, optimize=True))
        if e.requires_grad:
            e.accumulate(np.einsum('ni,ijk,nk->nj', g.data, weight.data, grad, optimize=True))

    out = np.einsum('ni,ijk,nj->nk', g.data, weight.data, e.data, optimize=True)
    return make_result(out, (g, weight, e), backward)


#
# Finite difference checking
#
def numerical_gradient(fn, tensor, eps=1e-5):
    """ Central differences of the scalar fn() with respect to tensor.data """

    grad = np.zeros_like(tensor.data)
    flat = tensor.data.reshape(-1)
    out = grad.reshape(-1)
    for i in range(flat.shape[0]):
        original = flat[i]
        flat[i] = original + eps
        plus = float(np.sum(as_tensor(fn()).data))
        flat[i] = original - eps
        minus = float(np.sum(as_tensor(fn()).data))
        flat[i] = original
        out[i] = (plus - minus) / (2.0 * eps)
    return grad


def relative_error(analytic, numeric):
    """ ||a - n|| / (||a|| + ||n||), 0 when both vanish """

    denominator = np.linalg.norm(analytic) + np.linalg.norm(numeric)
    if denominator < 1e-12:
        return 0.0
    return float(np.linalg.norm(analytic - numeric) / denominator)


def gradcheck(fn, tensors, eps=1e-5):
    """ Largest relative error between tape and finite difference gradients

    Arguments:
        fn (callable): Builds a tensor from tensors; its sum is differentiated
        tensors (list): Inputs that require gradients

    Returns:
        float: worst relative error over tensors
    """
    for tensor in tensors:
        tensor.zero_grad()
    with Tape() as tape:
        out = fn()
        total = sum(out) if out.size > 1 else out
    tape.backward(total)
    analytic = [np.zeros_like(t.data) if t.grad is None else t.grad.copy() for t in tensors]

    worst = 0.0
    for tensor, grad in zip(tensors, analytic):
        worst = max(worst, relative_error(grad, numerical_gradient(fn, tensor, eps)))
    return worst


__all__ = ['Tensor', 'add', 'sub', 'mul', 'matmul', 'relu', 'leaky_relu', 'tanh', 'concat',
           'reshape', 'gather_rows', 'scatter_sum', 'sum', 'mean', 'log_softmax',
           'segment_softmax', 'nll_loss', 'dropout', 'batchnorm', 'spmm', 'bilinear',
           'unbroadcast', 'numerical_gradient', 'relative_error', 'gradcheck']

# Copyright (C) 2021 The fea2fea Authors. All Rights Reserved.
#
#     File:    test_concat.py
#     Author:  fea2fea developers
#     Date:    2021-06-22
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
from fea2fea.exceptions import CombinationError, ShapeError
from fea2fea.nn import Tensor, ops
from fea2fea.pipeline import (BILINEAR, NTN, SIMPLE, NtnParams, concat_bilinear, concat_embeddings,
                              concat_ntn, concat_simple)

#
# Tests
#


def test_simple_examples():
    """One vector is returned as is, two unit vectors are joined"""
    a = np.array([0.3, -0.7, 1.1])
    assert concat_simple([a]).data.tolist() == a.tolist()
    assert concat_simple([[1.0, 0.0], [0.0, 1.0]]).data.tolist() == [1.0, 0.0, 0.0, 1.0]


@pytest.mark.parametrize("k, d", [(2, 1), (3, 5), (4, 7)])
def test_simple_width(k, d):
    """k embeddings of width d give k * d columns, in member order"""
    rng = np.random.default_rng(k * d)
    embeddings = [rng.normal(size=(6, d)) for _ in range(k)]
    out = concat_simple(embeddings).data
    assert out.shape == (6, k * d)
    assert np.array_equal(out[:, d:2 * d], embeddings[1])


def test_bilinear_zero_parameters():
    """No weights and no bias give tanh(0)"""
    params = NtnParams.zeros(3, 2)
    out = concat_bilinear([np.ones(3), np.full(3, 2.0)], params).data
    assert out.tolist() == [0.0] * 6


def test_single_embedding_passes_through():
    """k = 1 returns e_1 for both recurrences"""
    params = NtnParams.initialise(4, 3, np.random.default_rng(0))
    e = np.array([0.1, 0.2, 0.3, 0.4])
    assert concat_bilinear([e], params).data.tolist() == e.tolist()
    assert concat_ntn([e], params).data.tolist() == e.tolist()


def test_bilinear_matches_loops():
    """k = 2 against an explicit triple loop"""
    d = 3
    params = NtnParams.initialise(d, 2, np.random.default_rng(1))
    params.steps[0].bias.data[...] = np.random.default_rng(2).normal(size=2 * d)
    e1, e2 = np.random.default_rng(3).normal(size=(2, d))
    weight, bias = params.steps[0].weight.data, params.steps[0].bias.data
    expected = np.zeros(2 * d)
    for out in range(2 * d):
        total = bias[out]
        for i in range(d):
            for j in range(d):
                total += e1[i] * weight[i, j, out] * e2[j]
        expected[out] = np.tanh(total)
    assert concat_bilinear([e1, e2], params).data == pytest.approx(expected, abs=1e-12)


def test_ntn_reduces_to_tanh_of_simple():
    """With u = I, W = 0 and b = 0 two embeddings give tanh(e_1 ⊕ e_2)"""
    rng = np.random.default_rng(4)
    e1, e2 = rng.normal(size=(2, 8, 5))
    out = concat_ntn([e1, e2], NtnParams.zeros(5, 2)).data
    expected = np.tanh(np.concatenate([e1, e2], axis=1))
    assert np.max(np.abs(out - expected)) < 1e-12


def test_ntn_three_embeddings_nest():
    """Past two members the zeroed recurrence nests the tanh"""
    rng = np.random.default_rng(5)
    e1, e2, e3 = rng.normal(size=(3, 4))
    out = concat_ntn([e1, e2, e3], NtnParams.zeros(4, 3)).data
    expected = np.tanh(np.concatenate([np.tanh(np.concatenate([e1, e2])), e3]))
    assert np.max(np.abs(out - expected)) < 1e-12


def test_ntn_width():
    """Three members of width 64 give 192 values"""
    params = NtnParams.initialise(64, 3, np.random.default_rng(6))
    embeddings = np.random.default_rng(7).normal(size=(3, 64))
    assert concat_ntn(list(embeddings), params).shape == (192,)
    assert concat_bilinear(list(embeddings), params).shape == (192,)


def test_initialise_shapes():
    """W_t is ((t-1) d, d, t d), b_t zero and u_t the identity"""
    params = NtnParams.initialise(2, 4, np.random.default_rng(8))
    assert params.max_k == 4
    for t, step in enumerate(params.steps, start=2):
        assert step.weight.shape == ((t - 1) * 2, 2, t * 2)
        assert not step.bias.data.any()
        assert np.array_equal(step.u.data, np.eye(t * 2))


def test_recurrence_errors():
    """Mismatched widths, too many members and unknown methods"""
    params = NtnParams.zeros(3, 2)
    with pytest.raises(ShapeError):
        concat_ntn([np.ones(3), np.ones(4)], params)
    with pytest.raises(ShapeError):
        concat_ntn([np.ones(4), np.ones(4)], params)
    with pytest.raises(CombinationError):
        concat_ntn([np.ones(3)] * 3, params)
    with pytest.raises(CombinationError):
        concat_embeddings('outer', [np.ones(3)] * 2, params)
    with pytest.raises(CombinationError):
        concat_simple([])


@pytest.mark.parametrize("method", [SIMPLE, BILINEAR, NTN])
def test_gradients_flow_through_every_method(method):
    """Embeddings and recurrence weights against central differences"""
    rng = np.random.default_rng(9)
    params = NtnParams.initialise(2, 3, rng)
    embeddings = [Tensor(rng.normal(size=(3, 2)), requires_grad=True) for _ in range(3)]
    tensors = embeddings + (params.parameters() if method != SIMPLE else [])
    weights = rng.uniform(0.5, 1.5, size=(3, 6))

    def build():
        return ops.mul(concat_embeddings(method, embeddings, params), weights)
    assert ops.gradcheck(build, tensors) < 1e-5

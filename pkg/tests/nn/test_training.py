# Copyright (C) 2021 The fea2fea Authors. All Rights Reserved.
#
#     File:    test_training.py
#     Author:  fea2fea developers
#     Date:    2021-06-19
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
from fea2fea.exceptions import ConfigurationError, ShapeError, TrainingDivergedError
from fea2fea.graph import Graph
from fea2fea.nn import (Adam, LayerConfig, Parameter, PatienceIterator, TrainConfig, Trainer,
                        Tensor, accuracy, adam_step, build_model, forward, ops, predict)

#
# Helpers
#


def separable_problem(seed=0):
    """A line of 40 nodes labelled by the sign of a scalar input"""
    values = np.random.default_rng(seed).uniform(-1.0, 1.0, size=(40, 1))
    labels = (values[:, 0] > 0).astype(np.int64)
    return Graph.from_edges(40, []), Tensor(values), labels


def closures(model, graph, x, labels, with_val=True):
    """loss_fn / evaluate_fn pair over fixed thirds of the nodes"""
    train, val, test = np.arange(0, 24), np.arange(24, 32), np.arange(32, 40)

    def loss_fn():
        out = forward(model, graph, x, True)
        return ops.nll_loss(ops.gather_rows(out, train), labels[train])

    def evaluate_fn():
        pred = predict(forward(model, graph, x, False))
        return {
            'train': accuracy(pred[train], labels[train]),
            'val': accuracy(pred[val], labels[val]) if with_val else None,
            'test': accuracy(pred[test], labels[test]),
        }

    return loss_fn, evaluate_fn

#
# Tests
#


def test_accuracy_examples():
    """Identical, disjoint and three of four"""
    assert accuracy([1, 2, 3], [1, 2, 3]) == 1.0
    assert accuracy([0, 0], [1, 1]) == 0.0
    assert accuracy([1, 1, 0, 1], [1, 1, 1, 1]) == 0.75


def test_accuracy_rejects():
    """Nothing to score, or lengths that differ"""
    with pytest.raises(ShapeError):
        accuracy([], [])
    with pytest.raises(ShapeError):
        accuracy([1, 2], [1])


def test_adam_zero_gradient():
    """No gradient and no decay leave parameters alone"""
    params = [np.array([1.0, -2.0])]
    updated, state = adam_step(params, [np.zeros(2)])
    assert updated[0].tolist() == [1.0, -2.0]
    assert state['step'] == 1


def test_adam_first_step():
    """Bias correction makes the first step lr * sign(g)"""
    params = [np.array([0.5, 0.5, 0.5])]
    grads = [np.array([3.0, -0.01, 200.0])]
    updated, _ = adam_step(params, grads, lr=0.1)
    assert updated[0] == pytest.approx([0.4, 0.6, 0.4], abs=1e-6)
    assert params[0].tolist() == [0.5, 0.5, 0.5]


def test_adam_weight_decay():
    """The L2 term pulls towards zero even without a gradient"""
    updated, _ = adam_step([np.array([2.0])], [None], lr=0.01, weight_decay=0.1)
    assert updated[0][0] == pytest.approx(1.99)


def test_adam_in_place():
    """The optimiser writes into the parameters it manages"""
    weight = Parameter([1.0, 1.0])
    weight.grad = np.array([1.0, -1.0])
    optimizer = Adam([weight], lr=0.5, weight_decay=0.0)
    optimizer.step()
    assert weight.data == pytest.approx([0.5, 1.5])
    optimizer.zero_grad()
    assert weight.grad is None


def test_patience_iterator_stops():
    """Ties do not count as improvements and keep the earlier epoch"""
    epochs = PatienceIterator(10, patience=2)
    scores = iter([0.5, 0.6, 0.6, 0.6, 0.9])
    seen = []
    for epoch in epochs:
        seen.append(epoch)
        epochs.report(next(scores))
    assert seen == [1, 2, 3, 4]
    assert epochs.best_epoch == 2
    assert epochs.best_score == 0.6


def test_patience_zero_runs_the_budget():
    """0 disables early stopping"""
    epochs = PatienceIterator(7, patience=0)
    count = 0
    for _ in epochs:
        epochs.report(0.0)
        count += 1
    assert count == 7
    assert epochs.best_epoch == 1


@pytest.mark.parametrize("kwargs", [
    {'epochs': 0}, {'lr': 0.0}, {'weight_decay': -1.0}, {'patience': -1},
])
def test_train_config_rejects(kwargs):
    """Budgets and rates must be usable"""
    with pytest.raises(ConfigurationError):
        TrainConfig(**kwargs)


def test_trainer_learns_and_restores_best():
    """The kept weights reproduce the reported accuracies"""
    graph, x, labels = separable_problem()
    model = build_model(LayerConfig(conv_type='MLP', hidden_dim=16, out_dim=2), 0)
    loss_fn, evaluate_fn = closures(model, graph, x, labels)
    result = Trainer(TrainConfig(epochs=150, patience=0)).fit(model, loss_fn, evaluate_fn)

    assert result.epochs_run == 150
    assert max(row['train_accuracy'] for row in result.history) >= 0.9
    assert result.losses()[-1] < result.losses()[0]
    assert evaluate_fn() == {'train': result.train_accuracy, 'val': result.val_accuracy,
                             'test': result.test_accuracy}
    best_row = result.history[result.best_epoch - 1]
    assert best_row['train_accuracy'] == result.train_accuracy
    assert best_row['val_accuracy'] == max(row['val_accuracy'] for row in result.history)


def test_trainer_is_deterministic():
    """Same seed, same history"""
    histories = []
    for _ in range(2):
        graph, x, labels = separable_problem()
        model = build_model(LayerConfig(conv_type='MLP', hidden_dim=8, out_dim=2, dropout_p=0.3), 4)
        loss_fn, evaluate_fn = closures(model, graph, x, labels)
        histories.append(Trainer(TrainConfig(epochs=20)).fit(model, loss_fn, evaluate_fn).history)
    assert histories[0] == histories[1]


def test_trainer_without_validation_uses_train():
    """Selection falls back to the training accuracy"""
    graph, x, labels = separable_problem(1)
    model = build_model(LayerConfig(conv_type='MLP', hidden_dim=8, out_dim=2), 1)
    loss_fn, evaluate_fn = closures(model, graph, x, labels, with_val=False)
    result = Trainer(TrainConfig(epochs=30, patience=0)).fit(model, loss_fn, evaluate_fn)
    assert result.val_accuracy is None
    assert result.train_accuracy == max(row['train_accuracy'] for row in result.history)


def test_trainer_diverged():
    """A NaN loss stops training with an error"""
    model = build_model(LayerConfig(conv_type='MLP', hidden_dim=4, out_dim=2), 0)
    weight = model.parameters()[0]

    def loss_fn():
        return ops.sum(ops.mul(weight, float('nan')))

    with pytest.raises(TrainingDivergedError):
        Trainer(TrainConfig(epochs=3)).fit(model, loss_fn, lambda: {'train': 0.0})

# Copyright (C) 2021 The fea2fea Authors. All Rights Reserved.
#
#     File:    training.py
#     Author:  fea2fea developers
#     Date:    2021-06-10
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
Full batch training with Adam and early stopping on validation accuracy
"""

import logging

# Third Party
import numpy as np

# This project
from fea2fea.exceptions import ConfigurationError, ShapeError, TrainingDivergedError
from ._optim import Adam
from ._tensor import Tape

_LOGGER = logging.getLogger(__name__)


def predict(log_probs):
    """ Arg-max class per row of a tensor or array """
    values = getattr(log_probs, 'data', log_probs)
    return np.argmax(values, axis=1)


def accuracy(pred, truth):
    """ Fraction of positions where pred equals truth

    Raises:
        ShapeError: Different lengths or nothing to score
    """
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    if pred.shape != truth.shape or not truth.size:
        raise ShapeError("Cannot score predictions {} against truth {}".format(
            pred.shape, truth.shape), pred.shape, truth.shape)
    return float(np.mean(pred == truth))


class TrainConfig(object):
    """Optimisation settings for one training run

    Attributes:
        epochs (int): Epoch budget
        lr (float): Adam learning rate
        weight_decay (float): L2 penalty added to the gradients
        patience (int): Epochs without a validation improvement before
            stopping; 0 trains for the full budget
    """

    DEFAULT_EPOCHS = 200
    """Default epoch budget"""

    DEFAULT_LR = 0.01
    """Default learning rate"""

    DEFAULT_WEIGHT_DECAY = 5e-4
    """Default weight decay"""

    DEFAULT_PATIENCE = 20
    """Default early stopping patience"""

    def __init__(self, epochs=None, lr=None, weight_decay=None, patience=None):
        if epochs is None:
            epochs = TrainConfig.DEFAULT_EPOCHS
        self.epochs = int(epochs)

        if lr is None:
            lr = TrainConfig.DEFAULT_LR
        self.lr = float(lr)

        if weight_decay is None:
            weight_decay = TrainConfig.DEFAULT_WEIGHT_DECAY
        self.weight_decay = float(weight_decay)

        if patience is None:
            patience = TrainConfig.DEFAULT_PATIENCE
        self.patience = int(patience)

        if self.epochs < 1 or self.lr <= 0 or self.weight_decay < 0 or self.patience < 0:
            raise ConfigurationError(
                "Invalid training settings epochs={} lr={} weight_decay={} patience={}".format(
                    self.epochs, self.lr, self.weight_decay, self.patience))

    def to_dict(self):
        """ JSON-ready representation """
        return {'epochs': self.epochs, 'lr': self.lr, 'weight_decay': self.weight_decay,
                'patience': self.patience}

    def __repr__(self):
        return "<{} {}>".format(self.__class__.__name__, self.to_dict())


class PatienceIterator(object):
    """
    Epoch counter that runs out at the budget, or after ``patience``
    consecutive epochs whose reported score did not beat the best so far
    """

    def __init__(self, max_epochs, patience=0, debug=False):
        self._max_epochs = max_epochs
        self._patience = patience
        self._debug = debug
        self._epoch = 0
        self._stale = 0
        self.best_score = None
        self.best_epoch = None
        self._logger = logging.getLogger(__name__)

    def __iter__(self):
        return self

    def __str__(self):
        return "epoch {}/{} (best {} at {})".format(self._epoch, self._max_epochs,
                                                    self.best_score, self.best_epoch)

    def __next__(self):
        if self._epoch >= self._max_epochs:
            raise StopIteration()
        if self._patience and self._stale >= self._patience:
            if self._debug:
                self._logger.debug("No improvement for %s epochs, stopping at %s",
                                   self._stale, self._epoch)
            raise StopIteration()
        self._epoch += 1
        return self._epoch

    def report(self, score):
        """ Record the epoch's score; True when it is a new best (ties keep the earlier epoch) """
        if self.best_score is None or score > self.best_score:
            self.best_score = score
            self.best_epoch = self._epoch
            self._stale = 0
            return True
        self._stale += 1
        return False


class TrainResult(object):
    """
    Outcome of a training run, with the model restored to its best epoch

    Attributes:
        best_epoch (int): Epoch whose weights were kept
        train_accuracy (float): Training accuracy at best_epoch
        val_accuracy (float): Validation accuracy at best_epoch, None without validation data
        test_accuracy (float): Test accuracy at best_epoch
        history (list): One dict per epoch with ``epoch``, ``loss``,
            ``train_accuracy``, ``val_accuracy`` and ``test_accuracy``
    """

    def __init__(self, best_epoch, scores, history):
        self.best_epoch = best_epoch
        self.train_accuracy = scores.get('train')
        self.val_accuracy = scores.get('val')
        self.test_accuracy = scores.get('test')
        self.history = history

    @property
    def epochs_run(self):
        """ Number of epochs actually trained """
        return len(self.history)

    def losses(self):
        """ Training loss per epoch """
        return [row['loss'] for row in self.history]

    def __repr__(self):
        return "<{} best_epoch={} val={} test={}>".format(
            self.__class__.__name__, self.best_epoch, self.val_accuracy, self.test_accuracy)


class Trainer(object):
    """
    Drives a model through full batch epochs

    The caller supplies two closures: ``loss_fn()`` runs the forward pass in
    training mode and returns the scalar loss tensor, ``evaluate_fn()``
    returns ``{'train': acc, 'val': acc or None, 'test': acc}`` computed in
    evaluation mode.  The epoch with the highest validation accuracy (the
    training accuracy when there is no validation data) wins.
    """

    def __init__(self, config=None, label=None):
        self.config = TrainConfig() if config is None else config
        self.label = label or 'model'
        self._logger = logging.getLogger(__name__)

    def fit(self, model, loss_fn, evaluate_fn):
        """ Train model in place and restore its best weights

        Returns:
            TrainResult

        Raises:
            TrainingDivergedError: The loss became NaN or infinite
        """
        optimizer = Adam(model.parameters(), lr=self.config.lr,
                         weight_decay=self.config.weight_decay)
        epochs = PatienceIterator(self.config.epochs, self.config.patience,
                                  debug=self._logger.isEnabledFor(logging.DEBUG))
        history = []
        best_state, best_scores = model.state_dict(), {}

        for epoch in epochs:
            model.train()
            optimizer.zero_grad()
            with Tape() as tape:
                loss = loss_fn()
            loss_value = float(loss.data)
            if not np.isfinite(loss_value):
                message = "Training of {} diverged at epoch {} (loss {})".format(
                    self.label, epoch, loss_value)
                self._logger.error(message)
                raise TrainingDivergedError(message)
            tape.backward(loss)
            optimizer.step()

            model.eval()
            scores = evaluate_fn()
            history.append({
                'epoch': epoch,
                'loss': loss_value,
                'train_accuracy': scores.get('train'),
                'val_accuracy': scores.get('val'),
                'test_accuracy': scores.get('test'),
            })
            self._logger.debug("%s epoch %s loss %.5f train %s val %s", self.label, epoch,
                               loss_value, scores.get('train'), scores.get('val'))

            selection = scores.get('val')
            if epochs.report(scores.get('train') if selection is None else selection):
                best_state, best_scores = model.state_dict(), dict(scores)

        model.load_state_dict(best_state)
        model.eval()
        result = TrainResult(epochs.best_epoch, best_scores, history)
        self._logger.debug("%s finished after %s epochs: %r", self.label, len(history), result)
        return result

# Copyright (C) 2021 The fea2fea Authors. All Rights Reserved.
#
#     File:    single.py
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
Single feature to single feature prediction and the correlation matrix

Entry (i, j) of the matrix is the mean test accuracy of models that
predict the binned feature j from feature i alone.  Column 0 (predicting
the constant) is never trained; it mirrors row 0.
"""

import logging

# Third Party
import jsonschema
import numpy as np

# This project
from fea2fea.exceptions import (ConfigurationError, DegenerateFeatureError, ExportError)
from fea2fea.features.binning import BinningSpec, fit_bins, apply_bins
from fea2fea.features.structural import FEATURE_NAMES, CONS
from fea2fea.nn import LayerConfig, TrainConfig, Trainer, build_model, forward, ops
from fea2fea.nn.training import accuracy, predict
from fea2fea.types import CorrelationEntry
from fea2fea.util.export import read_json, write_csv, write_json
from fea2fea.util.parallel import run_tasks
from fea2fea.util.seeds import derive_seed
from .base import prepare_data, standardise

LOGGER = logging.getLogger(__name__)

NUM_FEATURES = len(FEATURE_NAMES)
SCHEMA_VERSION = 1

JSON_SCHEMA = {
    'type': 'object',
    'required': ['schema_version', 'features', 'entries'],
    'properties': {
        'schema_version': {'enum': [SCHEMA_VERSION]},
        'features': {'type': 'array', 'items': {'enum': list(FEATURE_NAMES)}},
        'entries': {
            'type': 'array',
            'items': {
                'type': 'object',
                'required': ['input', 'output', 'accuracies', 'excluded'],
            },
        },
        'metadata': {'type': 'object'},
    },
}


class PairTask(object):
    """One (input feature, output feature) training job

    Attributes:
        input_idx (int): Predicting feature
        output_idx (int): Predicted feature, never the constant
        binning (BinningSpec): Unfitted binning of the output column
        model (LayerConfig): Architecture; widths are set from the task
        seed (int): Model seed
        train (TrainConfig): Optimisation settings
    """

    def __init__(self, input_idx, output_idx, binning=None, model=None, seed=0, train=None):
        if not 0 <= input_idx < NUM_FEATURES or not 0 <= output_idx < NUM_FEATURES:
            raise ConfigurationError("Feature indices must lie in 0..{}".format(NUM_FEATURES - 1))
        if output_idx == CONS:
            raise ConfigurationError("The constant feature is only an input, never an output")

        self.input_idx = int(input_idx)
        self.output_idx = int(output_idx)
        self.binning = BinningSpec.for_feature(output_idx) if binning is None else binning
        self.model = LayerConfig() if model is None else model
        self.seed = int(seed)
        self.train = TrainConfig() if train is None else train

    @property
    def label(self):
        """ e.g. ``deg->clu#12345`` """
        return "{}->{}#{}".format(FEATURE_NAMES[self.input_idx], FEATURE_NAMES[self.output_idx],
                                  self.seed)

    def __repr__(self):
        return "<{} {}>".format(self.__class__.__name__, self.label)


class PairOutcome(object):
    """ Accuracy of a pair task plus the training record behind it """

    def __init__(self, task, accuracy_value, result, binning):
        self.task = task
        self.accuracy = accuracy_value
        self.result = result
        self.binning = binning


def node_trainer_closures(model, graph, x, labels, rows, pooling=None):
    """ (loss_fn, evaluate_fn) for full batch classification on one graph

    Arguments:
        model (Module): Maps (graph, x, pooling) to log-probabilities
        graph (Graph): The graph, or a disjoint union
        x (numpy.ndarray): Input matrix
        labels (numpy.ndarray): Class per output row
        rows (dict): Split name -> output row indices; with pooling the
            output rows are graphs
        pooling (scipy.sparse matrix, optional): Readout
    """

    def loss_fn():
        log_probs = forward(model, graph, x, True, pooling)
        train = rows['train']
        return ops.nll_loss(ops.gather_rows(log_probs, train), labels[train])

    def evaluate_fn():
        predictions = predict(forward(model, graph, x, False, pooling))
        return dict((name, accuracy(predictions[index], labels[index]) if index.size else None)
                    for name, index in rows.items())

    return loss_fn, evaluate_fn


def run_pair(task, prepared):
    """ Train the model of one pair task

    Bins are fitted on the training nodes of the output column only.

    Returns:
        PairOutcome

    Raises:
        DegenerateFeatureError: The output column cannot be binned
    """
    binning = fit_bins(prepared.column(task.output_idx)[prepared.train_nodes], task.binning)
    labels = apply_bins(prepared.column(task.output_idx), binning)
    x = standardise(prepared.column(task.input_idx), prepared.train_nodes)

    cfg = task.model.replace(in_dim=1, out_dim=binning.num_classes)
    model = build_model(cfg, task.seed)
    loss_fn, evaluate_fn = node_trainer_closures(model, prepared.graph, x, labels,
                                                 prepared.splits())
    result = Trainer(task.train, label=task.label).fit(model, loss_fn, evaluate_fn)

    LOGGER.debug("%s: test accuracy %.4f at epoch %s", task.label, result.test_accuracy,
                 result.best_epoch)
    return PairOutcome(task, result.test_accuracy, result, binning)


def train_pair(task, data):
    """ Test accuracy of a model predicting binned output_idx from input_idx

    Arguments:
        task (PairTask): What to train
        data (NodeDataset, GraphCollection or PreparedData): Where to train

    Returns:
        float: test accuracy in [0, 1]
    """
    return run_pair(task, prepare_data(data)).accuracy


def _run_pair_job(job):
    """ Worker entry point: (task, prepared) -> (accuracy or None, reason) """
    task, prepared = job
    try:
        return run_pair(task, prepared).accuracy, None
    except DegenerateFeatureError as error:
        return None, str(error)


def binning_for(output_idx, num_bins=None, strategy=None):
    """ The unfitted spec used for an output feature """
    if strategy is None:
        return BinningSpec.for_feature(output_idx, num_bins)
    return BinningSpec(num_bins, strategy)


def evaluate_pair(data, input_idx, output_idx, base_cfg=None, seeds=(0, 1, 2), num_bins=None,
                  strategy=None, train_config=None, jobs=1, split_seed=0):
    """ One correlation matrix cell trained over seeds

    Returns:
        CorrelationEntry: excluded when the output cannot be binned
    """
    prepared = prepare_data(data, seed=split_seed)
    base_cfg = LayerConfig() if base_cfg is None else base_cfg
    seeds = [int(s) for s in seeds]
    if not seeds:
        raise ConfigurationError("At least one seed is needed")

    jobs_list = [(PairTask(input_idx, output_idx, binning_for(output_idx, num_bins, strategy),
                           base_cfg, derive_seed(seed, 'single', FEATURE_NAMES[input_idx],
                                                 FEATURE_NAMES[output_idx]),
                           train_config), prepared) for seed in seeds]
    outcomes = run_tasks(_run_pair_job, jobs_list, jobs)
    reasons = [reason for _, reason in outcomes if reason is not None]
    if reasons:
        return CorrelationEntry.excluded(input_idx, output_idx, reasons[0])
    return CorrelationEntry(input_idx, output_idx, [value for value, _ in outcomes])


def build_correlation_matrix(data, base_cfg=None, seeds=(0, 1, 2), num_bins=None, strategy=None,
                             train_config=None, jobs=1, split_seed=0):
    """ Fill the 5 x 5 correlation matrix

    Every (i, j) with j >= 1 is trained once per seed, diagonal included,
    and averaged.  Column 0 mirrors row 0 and the constant-to-constant
    cell is 1 by definition.  Features that take a single value are
    excluded along their whole row and column; a pair whose output cannot
    be binned on the training split is excluded on its own.

    Arguments:
        data: NodeDataset, GraphCollection or PreparedData
        base_cfg (LayerConfig): Architecture shared by every pair
        seeds (list): Root seeds; each pair derives its model seed from them
        num_bins (int, optional): Bins per output, 6 by default
        strategy (str, optional): Binning strategy for every output instead
            of the per feature defaults
        train_config (TrainConfig, optional): Optimisation settings
        jobs (int): Worker processes
        split_seed (int): Seed of the node or graph split

    Returns:
        CorrelationMatrix
    """
    prepared = prepare_data(data, seed=split_seed)
    base_cfg = LayerConfig() if base_cfg is None else base_cfg
    seeds = [int(s) for s in seeds]
    if not seeds:
        raise ConfigurationError("At least one seed is needed")

    degenerate = set(prepared.degenerate_features())
    for index in sorted(degenerate):
        LOGGER.warning("Feature '%s' is constant on '%s'; excluding its row and column",
                       FEATURE_NAMES[index], prepared.name)

    pairs, jobs_list = [], []
    for i in range(NUM_FEATURES):
        for j in range(1, NUM_FEATURES):
            if i in degenerate or j in degenerate:
                continue
            pairs.append((i, j))
            for seed in seeds:
                task = PairTask(i, j, binning_for(j, num_bins, strategy), base_cfg,
                                derive_seed(seed, 'single', FEATURE_NAMES[i], FEATURE_NAMES[j]),
                                train_config)
                jobs_list.append((task, prepared))

    outcomes = run_tasks(_run_pair_job, jobs_list, jobs)

    entries = {}
    for position, (i, j) in enumerate(pairs):
        chunk = outcomes[position * len(seeds):(position + 1) * len(seeds)]
        reasons = [reason for _, reason in chunk if reason is not None]
        if reasons:
            entries[(i, j)] = CorrelationEntry.excluded(i, j, reasons[0])
        else:
            entries[(i, j)] = CorrelationEntry(i, j, [value for value, _ in chunk])
        LOGGER.info("R(%s, %s) = %s", FEATURE_NAMES[i], FEATURE_NAMES[j], entries[(i, j)])

    for i in range(NUM_FEATURES):
        for j in range(1, NUM_FEATURES):
            if (i, j) not in entries:
                entries[(i, j)] = CorrelationEntry.excluded(
                    i, j, "feature '{}' is constant".format(
                        FEATURE_NAMES[i] if i in degenerate else FEATURE_NAMES[j]))
    for i in range(1, NUM_FEATURES):
        entries[(i, CONS)] = entries[(CONS, i)].mirrored(i, CONS)
    entries[(CONS, CONS)] = CorrelationEntry(CONS, CONS, [1.0] * len(seeds))

    metadata = {
        'dataset': prepared.name,
        'mode': prepared.mode,
        'model': base_cfg.to_dict(),
        'train': (train_config or TrainConfig()).to_dict(),
        'binning': dict((FEATURE_NAMES[j], binning_for(j, num_bins, strategy).to_dict())
                        for j in range(1, NUM_FEATURES)),
        'seeds': seeds,
        'split_seed': split_seed,
    }
    return CorrelationMatrix(entries, metadata)


class CorrelationMatrix(object):
    """
    5 x 5 matrix of pairwise prediction accuracies

    Attributes:
        values (numpy.ndarray): Mean accuracy per cell, NaN where excluded
        std (numpy.ndarray): Standard deviation over seeds, NaN where excluded
        excluded (numpy.ndarray): Boolean mask of excluded cells
        metadata (dict): Model, binning, seeds and dataset of the run
    """

    def __init__(self, entries, metadata=None):
        missing = [(i, j) for i in range(NUM_FEATURES) for j in range(NUM_FEATURES)
                   if (i, j) not in entries]
        if missing:
            raise ConfigurationError("Correlation matrix is missing cells {}".format(missing))

        self._entries = dict(entries)
        self.metadata = dict(metadata or {})
        shape = (NUM_FEATURES, NUM_FEATURES)
        self.values = np.full(shape, np.nan)
        self.std = np.full(shape, np.nan)
        self.excluded = np.zeros(shape, dtype=bool)
        for (i, j), entry in self._entries.items():
            self.excluded[i, j] = entry.is_excluded
            if not entry.is_excluded:
                self.values[i, j] = entry.value
                self.std[i, j] = entry.std

    def entry(self, i, j):
        """ The CorrelationEntry of cell (i, j) """
        return self._entries[(i, j)]

    def redundant(self, i, j, threshold):
        """ True when R(i, j) >= threshold or the cell is excluded """
        return bool(self.excluded[i, j] or self.values[i, j] >= threshold)

    def to_dict(self):
        """ JSON-ready representation """

        def grid(array):
            return [[None if self.excluded[i, j] else float(array[i, j])
                     for j in range(NUM_FEATURES)] for i in range(NUM_FEATURES)]

        return {
            'schema_version': SCHEMA_VERSION,
            'features': list(FEATURE_NAMES),
            'values': grid(self.values),
            'std': grid(self.std),
            'excluded': self.excluded.tolist(),
            'entries': [self._entries[(i, j)].to_dict()
                        for i in range(NUM_FEATURES) for j in range(NUM_FEATURES)],
            'metadata': self.metadata,
        }

    def to_json(self, path):
        """ Write the full matrix with entries and metadata """
        write_json(path, self.to_dict())

    def csv_rows(self):
        """ One row per input feature, excluded cells as NaN """
        rows = []
        for i, name in enumerate(FEATURE_NAMES):
            row = {'feature': name}
            row.update((FEATURE_NAMES[j], float('nan') if self.excluded[i, j] else float(self.values[i, j]))
                       for j in range(NUM_FEATURES))
            rows.append(row)
        return rows

    def to_csv(self, path):
        """ Write the mean accuracies as a named 5 x 5 table; excluded cells read ``excluded`` """
        write_csv(path, ('feature',) + FEATURE_NAMES, self.csv_rows())

    @classmethod
    def from_dict(cls, document):
        """ Rebuild from :meth:`to_dict` output

        Raises:
            ExportError: The document does not validate
        """
        try:
            jsonschema.validate(document, JSON_SCHEMA)
        except jsonschema.ValidationError as error:
            message = "Invalid correlation matrix document: {}".format(error.message)
            LOGGER.error(message)
            raise ExportError(message)

        entries = {}
        for item in document['entries']:
            entry = CorrelationEntry.from_dict(item)
            entries[(entry.input_idx, entry.output_idx)] = entry
        return cls(entries, document.get('metadata'))

    @classmethod
    def from_json(cls, path):
        """ Read a matrix written by :meth:`to_json` """
        return cls.from_dict(read_json(path))

    @classmethod
    def from_values(cls, values, metadata=None):
        """ Matrix of single-seed entries from a 5 x 5 array; NaN marks excluded cells """
        values = np.asarray(values, dtype=np.float64)
        if values.shape != (NUM_FEATURES, NUM_FEATURES):
            raise ConfigurationError("Expected a {0} x {0} array, got {1}".format(
                NUM_FEATURES, values.shape))
        entries = {}
        for i in range(NUM_FEATURES):
            for j in range(NUM_FEATURES):
                if np.isnan(values[i, j]):
                    entries[(i, j)] = CorrelationEntry.excluded(i, j, "not measured")
                else:
                    entries[(i, j)] = CorrelationEntry(i, j, [values[i, j]])
        return cls(entries, metadata)

    def __repr__(self):
        return "<{} dataset={} excluded={}>".format(self.__class__.__name__,
                                                    self.metadata.get('dataset'),
                                                    int(self.excluded.sum()))


__all__ = ['PairTask', 'PairOutcome', 'CorrelationMatrix', 'train_pair', 'run_pair',
           'build_correlation_matrix', 'evaluate_pair', 'binning_for', 'node_trainer_closures']

# Copyright (C) 2021 The fea2fea Authors. All Rights Reserved.
#
#     File:    multiple.py
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
Multiple features to single feature prediction

Combinations of 2 to 4 input features are enumerated for a target,
combinations holding a redundant pair (either direction of the
correlation matrix at or above the threshold) are dropped, and a model
is trained per surviving combination and concatenation method.
"""

import itertools
import logging

# Third Party
import numpy as np

# This project
from fea2fea.exceptions import CombinationError, DegenerateFeatureError, ShapeError
from fea2fea.features.binning import fit_bins, apply_bins
from fea2fea.features.structural import FEATURE_NAMES
from fea2fea.nn import (LayerConfig, TrainConfig, Trainer, Module, MLP, GNNStack, ops,
                        seeded_generators)
from fea2fea.nn._tensor import as_tensor
from fea2fea.util.parallel import run_tasks
from fea2fea.util.seeds import derive_seed
from .base import prepare_data, standardise
from .concat import CONCAT_METHODS, SIMPLE, NtnParams, concat_embeddings
from .single import binning_for, node_trainer_closures

LOGGER = logging.getLogger(__name__)

MIN_MEMBERS = 2
MAX_MEMBERS = 4
MAX_FEATURES = 16
DEFAULT_THRESHOLD = 0.85
DEFAULT_EMBED_DIM = 64


class FeatureCombination(object):
    """A set of input features and the feature they predict

    Attributes:
        members (tuple): Ascending input feature indices, 2 to 4 of them
        target_idx (int): Predicted feature, not a member
    """

    def __init__(self, members, target_idx):
        members = tuple(sorted(set(int(m) for m in members)))
        if not MIN_MEMBERS <= len(members) <= MAX_MEMBERS:
            raise CombinationError("A combination has {} to {} members, got {}".format(
                MIN_MEMBERS, MAX_MEMBERS, members))
        if target_idx in members:
            raise CombinationError("Target {} cannot be one of its inputs {}".format(target_idx, members))
        self.members = members
        self.target_idx = int(target_idx)

    @property
    def k(self):
        """ Number of members """
        return len(self.members)

    def pairs(self):
        """ Every unordered member pair """
        return list(itertools.combinations(self.members, 2))

    def names(self):
        """ Member names, e.g. ``('cons', 'avglen')`` """
        return tuple(FEATURE_NAMES[m] if m < len(FEATURE_NAMES) else str(m) for m in self.members)

    def to_dict(self):
        """ JSON-ready representation """
        return {'members': list(self.members), 'target': self.target_idx}

    def __eq__(self, other):
        if not isinstance(other, FeatureCombination):
            return NotImplemented
        return self.members == other.members and self.target_idx == other.target_idx

    def __ne__(self, other):
        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    def __hash__(self):
        return hash((self.members, self.target_idx))

    def __repr__(self):
        return "<{} {} -> {}>".format(self.__class__.__name__, "+".join(self.names()),
                                      self.target_idx)


def enumerate_combinations(num_features=len(FEATURE_NAMES), target_idx=1):
    """ Every 2, 3 and 4 member subset of the non-target features

    Ordered by size, then lexicographically.

    Raises:
        CombinationError: More than 16 features or a target out of range
    """
    if num_features > MAX_FEATURES:
        raise CombinationError("Refusing to enumerate subsets of {} features (limit {})".format(
            num_features, MAX_FEATURES))
    if not 0 <= target_idx < num_features:
        raise CombinationError("Target {} outside 0..{}".format(target_idx, num_features - 1))

    others = [f for f in range(num_features) if f != target_idx]
    return [FeatureCombination(members, target_idx)
            for size in range(MIN_MEMBERS, MAX_MEMBERS + 1)
            for members in itertools.combinations(others, size)]


def _redundancy(matrix):
    """ (values, excluded) arrays of a CorrelationMatrix or a plain array """
    if hasattr(matrix, 'excluded'):
        return matrix.values, matrix.excluded
    values = np.asarray(matrix, dtype=np.float64)
    return values, np.isnan(values)


def filter_combinations(combinations, matrix, threshold=DEFAULT_THRESHOLD):
    """ Keep combinations whose every member pair has R(i, j) < t and R(j, i) < t

    Excluded cells (NaN in a plain array) count as redundant.

    Arguments:
        combinations (list): FeatureCombination instances
        matrix (CorrelationMatrix or numpy.ndarray): Pairwise accuracies
        threshold (float): Redundancy cutoff t
    """
    values, excluded = _redundancy(matrix)
    survivors = []
    for combination in combinations:
        clash = None
        for i, j in combination.pairs():
            if (excluded[i, j] or excluded[j, i] or values[i, j] >= threshold or
                    values[j, i] >= threshold):
                clash = (i, j)
                break
        if clash is None:
            survivors.append(combination)
        else:
            LOGGER.debug("Dropping %r: pair %s is redundant at t=%s", combination, clash, threshold)
    LOGGER.info("%s of %s combinations survive threshold %s", len(survivors), len(combinations),
                threshold)
    return survivors


class CombinationEncoder(Module):
    """
    Per feature 1 -> d -> d MLPs whose outputs are concatenated

    Output width is k * d for every method.
    """

    def __init__(self, num_members, method, embed_dim, rng):
        super(CombinationEncoder, self).__init__()
        if method not in CONCAT_METHODS:
            raise CombinationError("Unknown concatenation '{}'".format(method))
        self.method = method
        self.embed_dim = int(embed_dim)
        self.encoders = [MLP(1, embed_dim, embed_dim, rng) for _ in range(num_members)]
        self.params = (NtnParams.initialise(embed_dim, num_members, rng)
                       if method != SIMPLE and num_members > 1 else None)

    @property
    def out_dim(self):
        """ k * d """
        return len(self.encoders) * self.embed_dim

    def forward(self, columns):
        columns = np.asarray(columns, dtype=np.float64)
        embeddings = [encoder(columns[:, index:index + 1])
                      for index, encoder in enumerate(self.encoders)]
        if len(embeddings) == 1:
            return embeddings[0]
        return concat_embeddings(self.method, embeddings, self.params)


class CombinationModel(Module):
    """
    Encoded feature combination, optionally joined with extra raw columns,
    then the convolution stack, an optional readout and the MLP head

    The input matrix holds the k member columns first and the extra
    columns after them.
    """

    def __init__(self, num_members, method, embed_dim, extra_dim, cfg, seed):
        super(CombinationModel, self).__init__()
        init_rng, dropout_rng = seeded_generators(seed)
        self.num_members = int(num_members)
        self.extra_dim = int(extra_dim)
        self.encoder = CombinationEncoder(num_members, method, embed_dim, init_rng)
        in_dim = self.encoder.out_dim + self.extra_dim
        if in_dim < 1:
            raise CombinationError("The model has no input columns")
        self.config = cfg.replace(in_dim=in_dim)
        self.stack = GNNStack(self.config, in_dim, init_rng, dropout_rng)
        self.head = MLP(cfg.hidden_dim, cfg.hidden_dim, cfg.out_dim, init_rng)

    def inputs(self, x):
        """ Encoded members ⊕ extra columns, |V| x (k d + F) """
        values = np.asarray(getattr(x, 'data', x), dtype=np.float64)
        if values.shape[1] != self.num_members + self.extra_dim:
            raise ShapeError("Expected {} input columns, got {}".format(
                self.num_members + self.extra_dim, values.shape[1]),
                values.shape, (values.shape[0], self.num_members + self.extra_dim))
        parts = []
        if self.num_members:
            parts.append(self.encoder(values[:, :self.num_members]))
        if self.extra_dim:
            parts.append(as_tensor(values[:, self.num_members:]))
        return parts[0] if len(parts) == 1 else ops.concat(parts, axis=1)

    def embed(self, graph, x, pooling=None):
        """ Activations entering the head """
        h = self.stack(self.inputs(x), graph)
        return h if pooling is None else ops.spmm(pooling, h)

    def forward(self, graph, x, pooling=None):
        return ops.log_softmax(self.head(self.embed(graph, x, pooling)), axis=1)


class CombinationResult(object):
    """Accuracy of one combination under one concatenation method

    Attributes:
        combination (FeatureCombination): Inputs and target
        concat_method (str): simple, bilinear or ntn
        accuracies (tuple): Test accuracy per seed
        seeds (tuple): Model seeds
    """

    def __init__(self, combination, concat_method, accuracies, seeds, excluded_reason=None):
        self.combination = combination
        self.concat_method = concat_method
        self.accuracies = tuple(float(a) for a in accuracies)
        self.seeds = tuple(int(s) for s in seeds)
        self.excluded_reason = excluded_reason

    @property
    def accuracy(self):
        """ Mean test accuracy over seeds """
        return float(np.mean(self.accuracies)) if self.accuracies else float('nan')

    @property
    def std(self):
        """ Standard deviation over seeds """
        return float(np.std(self.accuracies)) if self.accuracies else float('nan')

    def to_dict(self):
        """ JSON-ready representation """
        return {
            'members': list(self.combination.members),
            'member_names': list(self.combination.names()),
            'target': self.combination.target_idx,
            'target_name': FEATURE_NAMES[self.combination.target_idx],
            'k': self.combination.k,
            'concat_method': self.concat_method,
            'accuracies': list(self.accuracies),
            'seeds': list(self.seeds),
            'accuracy': None if self.excluded_reason else self.accuracy,
            'std': None if self.excluded_reason else self.std,
            'excluded_reason': self.excluded_reason,
        }

    def __repr__(self):
        return "<{} {!r} {} {:.3f}>".format(self.__class__.__name__, self.combination,
                                            self.concat_method, self.accuracy)


def _combination_label(combination, method, seed):
    return "{}->{}:{}#{}".format("+".join(combination.names()),
                                 FEATURE_NAMES[combination.target_idx], method, seed)


def train_combination_once(combination, method, prepared, cfg, seed, embed_dim=DEFAULT_EMBED_DIM,
                           num_bins=None, strategy=None, train_config=None):
    """ Test accuracy of one seeded model for combination

    Raises:
        DegenerateFeatureError: The target cannot be binned
    """
    target = prepared.column(combination.target_idx)
    binning = fit_bins(target[prepared.train_nodes],
                       binning_for(combination.target_idx, num_bins, strategy))
    labels = apply_bins(target, binning)
    columns = standardise(prepared.features[:, list(combination.members)], prepared.train_nodes)

    model = CombinationModel(combination.k, method, embed_dim, 0,
                             cfg.replace(out_dim=binning.num_classes), seed)
    loss_fn, evaluate_fn = node_trainer_closures(model, prepared.graph, columns, labels,
                                                 prepared.splits())
    label = _combination_label(combination, method, seed)
    result = Trainer(train_config, label=label).fit(model, loss_fn, evaluate_fn)
    return result.test_accuracy


def _run_combination_job(job):
    """ Worker entry point """
    combination, method, prepared, cfg, seed, embed_dim, num_bins, strategy, train_config = job
    try:
        return train_combination_once(combination, method, prepared, cfg, seed, embed_dim,
                                      num_bins, strategy, train_config), None
    except DegenerateFeatureError as error:
        return None, str(error)


def _model_seed(root, combination, method):
    return derive_seed(root, 'multiple', FEATURE_NAMES[combination.target_idx],
                       "+".join(combination.names()), method)


def train_multi(combination, concat_method, data, cfg=None, seeds=(0,), embed_dim=None,
                num_bins=None, strategy=None, train_config=None, split_seed=0):
    """ Train combination -> target with one concatenation method

    Per feature 1 -> d -> d MLPs, concatenation, the convolution stack of
    cfg and a two layer MLP classifier; the accuracy is the mean test
    accuracy over seeds.

    Returns:
        CombinationResult
    """
    results = run_multiple_jobs([(combination, concat_method)], data, cfg, seeds, embed_dim,
                                num_bins, strategy, train_config, split_seed, jobs=1)
    return results[0]


def run_multiple_jobs(work, data, cfg=None, seeds=(0,), embed_dim=None, num_bins=None,
                      strategy=None, train_config=None, split_seed=0, jobs=1):
    """ CombinationResult per (combination, method) in work, trained over seeds """

    prepared = prepare_data(data, seed=split_seed)
    cfg = LayerConfig() if cfg is None else cfg
    embed_dim = DEFAULT_EMBED_DIM if embed_dim is None else int(embed_dim)
    train_config = TrainConfig() if train_config is None else train_config
    seeds = [int(s) for s in seeds]

    jobs_list = []
    for combination, method in work:
        if method not in CONCAT_METHODS:
            raise CombinationError("Unknown concatenation '{}'".format(method))
        for seed in seeds:
            jobs_list.append((combination, method, prepared, cfg,
                              _model_seed(seed, combination, method), embed_dim, num_bins,
                              strategy, train_config))

    outcomes = run_tasks(_run_combination_job, jobs_list, jobs)

    results = []
    for position, (combination, method) in enumerate(work):
        chunk = outcomes[position * len(seeds):(position + 1) * len(seeds)]
        reasons = [reason for _, reason in chunk if reason is not None]
        model_seeds = [_model_seed(seed, combination, method) for seed in seeds]
        if reasons:
            LOGGER.warning("%r with %s excluded: %s", combination, method, reasons[0])
            results.append(CombinationResult(combination, method, [], model_seeds, reasons[0]))
        else:
            result = CombinationResult(combination, method, [value for value, _ in chunk], model_seeds)
            LOGGER.info("%r %s: %.4f", combination, method, result.accuracy)
            results.append(result)
    return results


def run_multiple(data, matrix, target_idx, threshold=DEFAULT_THRESHOLD, methods=CONCAT_METHODS,
                 **kwargs):
    """ Enumerate, filter and train every surviving combination for a target

    Returns:
        list: CombinationResult per surviving combination and method, in
        enumeration order
    """
    survivors = filter_combinations(enumerate_combinations(len(FEATURE_NAMES), target_idx),
                                    matrix, threshold)
    work = [(combination, method) for combination in survivors for method in methods]
    return run_multiple_jobs(work, data, **kwargs)


def summarize(results):
    """ Mean and standard deviation of accuracy per combination size k

    Returns:
        dict: k -> {'mean': float, 'std': float, 'count': int}
    """
    by_k = {}
    for result in results:
        if result.excluded_reason is None:
            by_k.setdefault(result.combination.k, []).append(result.accuracy)
    return dict((k, {'mean': float(np.mean(values)), 'std': float(np.std(values)),
                     'count': len(values)})
                for k, values in sorted(by_k.items()))


def summary_rows(results):
    """ Mean/std rows keyed by (target, k, concat method), sorted """
    groups = {}
    for result in results:
        if result.excluded_reason is None:
            key = (FEATURE_NAMES[result.combination.target_idx], result.combination.k,
                   result.concat_method)
            groups.setdefault(key, []).append(result.accuracy)
    return [{'target': target, 'k': k, 'concat_method': method, 'count': len(values),
             'mean': float(np.mean(values)), 'std': float(np.std(values))}
            for (target, k, method), values in sorted(groups.items())]

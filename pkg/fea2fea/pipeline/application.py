# Copyright (C) 2021 The fea2fea Authors. All Rights Reserved.
#
#     File:    application.py
#     Author:  fea2fea developers
#     Date:    2021-06-18
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
Node and graph classification with structural feature augmentation

The selected structural features each pass their own 1 -> d -> d MLP,
are joined by the configured concatenation and then appended to the
initial node features.  A three block convolution stack with batch
normalisation and skip connections, an optional readout and a two layer
MLP head classify the result.  With no structural features selected the
same model is the plain baseline on raw features.

Node datasets train on their train mask and select the epoch on the
validation mask.  Graph collections are split 8:1 into train and test
graphs and the train graphs are cross validated; per seed the fold model
with the best validation accuracy reports its test accuracy.
"""

import logging
import os

# Third Party
import numpy as np

# This project
from fea2fea.exceptions import ConfigurationError, FeatureException
from fea2fea.features.structural import FEATURE_NAMES, build_feature_matrix, feature_index
from fea2fea.graph import GraphBatch, GraphCollection, NodeDataset, graph_split, kfold, node_split, \
    planetoid_split
from fea2fea.nn import LayerConfig, Trainer, TrainConfig, forward, ops, seeded_generators
from fea2fea.nn.training import accuracy, predict
from fea2fea.util.export import write_embeddings, write_history, write_json
from fea2fea.util.parallel import run_tasks
from fea2fea.util.seeds import config_hash, derive_seed
from .base import GRAPH_MODE, NODE_MODE, standardise
from .concat import CONCAT_METHODS, SIMPLE
from .multiple import MAX_MEMBERS, CombinationEncoder, CombinationModel
from .single import node_trainer_closures

LOGGER = logging.getLogger(__name__)

READOUTS = ('mean', 'sum')
RATIO_SPLIT = 'ratio'
PLANETOID_SPLIT = 'planetoid'
NODE_SPLITS = (RATIO_SPLIT, PLANETOID_SPLIT)
GRAPH_RATIOS = (8, 1)
REPORT_VERSION = 1


class AugmentConfig(object):
    """Settings of the classification model

    Attributes:
        members (tuple): Structural feature indices to augment with, at most
            4; empty for the raw feature baseline
        concat_method (str): simple, bilinear or ntn
        gnn (LayerConfig): Convolution stack; None picks GCN for node
            datasets and GIN for graph collections
        readout (str): mean or sum pooling for graph collections
        embed_dim (int): Width d of every structural embedding
        num_folds (int): Cross validation folds for graph collections
        split (str): ratio or planetoid, for node datasets without masks
    """

    DEFAULT_CONCAT_METHOD = SIMPLE
    """Default concatenation"""

    DEFAULT_READOUT = 'mean'
    """Default graph readout"""

    DEFAULT_EMBED_DIM = 64
    """Default structural embedding width"""

    DEFAULT_DEPTH = 3
    """Default number of convolution blocks"""

    DEFAULT_HIDDEN_DIM = 64
    """Default hidden width"""

    DEFAULT_DROPOUT = 0.6
    """Default dropout probability"""

    DEFAULT_NUM_FOLDS = 10
    """Default number of cross validation folds"""

    DEFAULT_SPLIT = RATIO_SPLIT
    """Default node split"""

    def __init__(self, members=None, concat_method=None, gnn=None, readout=None, embed_dim=None,
                 num_folds=None, split=None):
        try:
            self.members = tuple(sorted(set(feature_index(m) for m in (members or ()))))
        except (FeatureException, TypeError, ValueError) as error:
            raise ConfigurationError("Invalid augmentation features {}: {}".format(members, error))
        if len(self.members) > MAX_MEMBERS:
            raise ConfigurationError("At most {} structural features augment a model, got {}".format(
                MAX_MEMBERS, len(self.members)))

        self.concat_method = AugmentConfig.DEFAULT_CONCAT_METHOD if concat_method is None \
            else str(concat_method).lower()
        if self.concat_method not in CONCAT_METHODS:
            raise ConfigurationError("Unknown concatenation '{}', expected one of {}".format(
                concat_method, ", ".join(CONCAT_METHODS)))

        self.readout = AugmentConfig.DEFAULT_READOUT if readout is None else str(readout).lower()
        if self.readout not in READOUTS:
            raise ConfigurationError("Unknown readout '{}', expected one of {}".format(
                readout, ", ".join(READOUTS)))

        self.gnn = gnn
        self.embed_dim = int(AugmentConfig.DEFAULT_EMBED_DIM if embed_dim is None else embed_dim)
        self.num_folds = int(AugmentConfig.DEFAULT_NUM_FOLDS if num_folds is None else num_folds)
        self.split = AugmentConfig.DEFAULT_SPLIT if split is None else str(split).lower()
        if self.split not in NODE_SPLITS:
            raise ConfigurationError("Unknown node split '{}', expected one of {}".format(
                split, ", ".join(NODE_SPLITS)))
        if self.embed_dim < 1 or self.num_folds < 2:
            raise ConfigurationError("Need embed_dim >= 1 and num_folds >= 2, got {} and {}".format(
                self.embed_dim, self.num_folds))

    @classmethod
    def null(cls, **kwargs):
        """ The raw feature baseline: no structural features """
        kwargs['members'] = ()
        return cls(**kwargs)

    @staticmethod
    def default_gnn(mode):
        """ GCN blocks for node datasets, GIN blocks for graph collections """
        return LayerConfig(conv_type='GCN' if mode == NODE_MODE else 'GIN',
                           hidden_dim=AugmentConfig.DEFAULT_HIDDEN_DIM,
                           depth=AugmentConfig.DEFAULT_DEPTH,
                           dropout_p=AugmentConfig.DEFAULT_DROPOUT,
                           use_batchnorm=True, use_skip=True)

    def layer_config(self, mode):
        """ The convolution stack used for mode """
        return AugmentConfig.default_gnn(mode) if self.gnn is None else self.gnn

    def to_dict(self, mode=None):
        """ JSON-ready representation; the stack is resolved when mode is given """
        gnn = self.gnn if mode is None else self.layer_config(mode)
        return {
            'members': [FEATURE_NAMES[m] for m in self.members],
            'concat_method': self.concat_method,
            'gnn': None if gnn is None else gnn.to_dict(),
            'readout': self.readout,
            'embed_dim': self.embed_dim,
            'num_folds': self.num_folds,
            'split': self.split,
        }

    def __repr__(self):
        return "<{} members={} concat={}>".format(
            self.__class__.__name__, "+".join(FEATURE_NAMES[m] for m in self.members) or '-',
            self.concat_method)


#
# Inputs
#
def _structural_features(data, members, features=None):
    """ |V| x 5 structural features, None when no member is selected """
    if not members:
        return None
    if features is not None:
        return np.asarray(getattr(features, 'values', features), dtype=np.float64)
    if isinstance(data, NodeDataset):
        return build_feature_matrix(data.graph).values
    return np.concatenate([build_feature_matrix(g).values for g in data.graphs])


def _initial_features(data):
    """ |V| x F initial features, None when the dataset has none """
    if isinstance(data, NodeDataset):
        initial = data.initial_node_features
    elif data.initial_node_features is not None:
        initial = np.concatenate(data.initial_node_features)
    else:
        initial = None
    if initial is not None and initial.shape[1] == 0:
        return None
    return initial


def _num_nodes(data):
    if isinstance(data, NodeDataset):
        return data.graph.num_nodes
    return int(sum(g.num_nodes for g in data.graphs))


def model_inputs(data, members, rows=None, features=None):
    """ Raw model input: selected structural columns, then initial features

    Structural columns are standardised over rows (every node when None).
    Without initial features only the structural columns are used; with
    neither, a single constant column stands in.

    Returns:
        tuple: (|V| x (k + F) matrix, F)
    """
    name = getattr(data, 'name', None) or 'dataset'
    num_nodes = _num_nodes(data)
    rows = np.arange(num_nodes) if rows is None else rows

    structural = _structural_features(data, members, features)
    initial = _initial_features(data)
    parts = []
    if members:
        parts.append(standardise(structural[:, list(members)], rows))
        if initial is None:
            LOGGER.warning("'%s' has no initial node features; using structural features only", name)
    if initial is not None:
        parts.append(initial)
    elif not members:
        LOGGER.warning("'%s' has no initial node features and no structural features were "
                       "selected; using a constant input column", name)
        initial = np.ones((num_nodes, 1))
        parts.append(initial)

    extra_dim = 0 if initial is None else initial.shape[1]
    return np.concatenate(parts, axis=1), extra_dim


def augment_features(data, cfg=None, seed=0, features=None):
    """ Augmented node features of a dataset

    Every selected structural feature passes its own freshly seeded
    1 -> d -> d MLP, the embeddings are concatenated by the configured
    method and the initial node features are appended.

    Arguments:
        data (NodeDataset or GraphCollection): Source of the graph and the
            initial features
        cfg (AugmentConfig): Members, concatenation and d
        seed (int): Seed of the encoder weights
        features (array, optional): Precomputed |V| x 5 structural features

    Returns:
        numpy.ndarray: |V| x (k d + F); the initial features unchanged when
        no member is selected
    """
    cfg = AugmentConfig() if cfg is None else cfg
    inputs, extra_dim = model_inputs(data, cfg.members, features=features)
    if not cfg.members:
        return inputs

    init_rng, _ = seeded_generators(seed)
    encoder = CombinationEncoder(len(cfg.members), cfg.concat_method, cfg.embed_dim, init_rng)
    k = len(cfg.members)
    encoded = encoder(inputs[:, :k]).data
    augmented = np.concatenate([encoded, inputs[:, k:]], axis=1) if extra_dim else encoded
    LOGGER.info("Augmented %s nodes to width %s", augmented.shape[0], augmented.shape[1])
    return augmented


#
# Reports
#
class ClassificationReport(object):
    """Test accuracies of one classification run

    Attributes:
        dataset (str): Dataset name
        mode (str): node or graph
        config (dict): Resolved model and training settings
        seeds (tuple): Root seeds
        accuracies (tuple): Test accuracy per seed
        fold_accuracies (list): Graph mode only, test accuracy per fold per seed
        embeddings (numpy.ndarray): Pre-head activations of the first seed's
            model, when requested
        embedding_labels (numpy.ndarray): Class per embedding row
        histories (list): Per seed training history of the reported model
    """

    def __init__(self, dataset, mode, config, seeds, accuracies, fold_accuracies=None,
                 embeddings=None, embedding_labels=None, histories=None):
        self.dataset = dataset
        self.mode = mode
        self.config = config
        self.seeds = tuple(int(s) for s in seeds)
        self.accuracies = tuple(float(a) for a in accuracies)
        self.fold_accuracies = fold_accuracies
        self.embeddings = embeddings
        self.embedding_labels = embedding_labels
        self.histories = histories

    @property
    def mean(self):
        """ Mean test accuracy over seeds """
        return float(np.mean(self.accuracies))

    @property
    def std(self):
        """ Standard deviation over seeds """
        return float(np.std(self.accuracies))

    @property
    def config_hash(self):
        """ sha256 of the canonical JSON config """
        return config_hash(self.config)

    def to_dict(self):
        """ JSON-ready representation, without the embeddings """
        document = {
            'report_version': REPORT_VERSION,
            'dataset': self.dataset,
            'mode': self.mode,
            'config': self.config,
            'config_hash': self.config_hash,
            'seeds': list(self.seeds),
            'accuracies': list(self.accuracies),
            'mean': self.mean,
            'std': self.std,
        }
        if self.fold_accuracies is not None:
            document['fold_accuracies'] = [list(folds) for folds in self.fold_accuracies]
        return document

    def to_json(self, path):
        """ Write :meth:`to_dict` """
        write_json(path, self.to_dict())

    def write_embeddings(self, path):
        """ Write the embeddings as TSV, the class label last

        Raises:
            ConfigurationError: The run did not keep embeddings
        """
        if self.embeddings is None:
            raise ConfigurationError("This report holds no embeddings")
        write_embeddings(path, self.embeddings, self.embedding_labels)

    def write_histories(self, run_dir):
        """ One history-<n>.csv per seed, n counting from 0 in seed order """
        paths = []
        for position, history in enumerate(self.histories or ()):
            path = os.path.join(run_dir, "history-{}.csv".format(position))
            write_history(path, history)
            paths.append(path)
        return paths

    def __repr__(self):
        return "<{} {} {} {:.4f} +- {:.4f}>".format(self.__class__.__name__, self.dataset,
                                                   self.mode, self.mean, self.std)


def _check_seeds(seeds):
    seeds = [int(s) for s in seeds]
    if not seeds:
        raise ConfigurationError("At least one seed is needed")
    return seeds


def _run_config(cfg, mode, train_config, split_seed):
    return {'augment': cfg.to_dict(mode), 'train': train_config.to_dict(), 'split_seed': split_seed}


#
# Node classification
#
def _node_job(job):
    """ Worker entry point: one seeded model on a node dataset """
    graph, x, labels, rows, members, cfg, gnn, extra_dim, seed, train_config, label, keep = job
    model = CombinationModel(len(members), cfg.concat_method, cfg.embed_dim, extra_dim, gnn, seed)
    loss_fn, evaluate_fn = node_trainer_closures(model, graph, x, labels, rows)
    result = Trainer(train_config, label=label).fit(model, loss_fn, evaluate_fn)
    embeddings = model.embed(graph, x).data if keep else None
    return result.test_accuracy, embeddings, result.history


def _node_dataset_split(dataset, split, seed):
    if dataset.train_mask.any() or dataset.val_mask.any() or dataset.test_mask.any():
        return dataset
    if split == PLANETOID_SPLIT:
        return planetoid_split(dataset, seed=seed)
    return node_split(dataset, seed=seed)


def classify_nodes(dataset, cfg=None, seeds=(0,), train_config=None, split_seed=0, jobs=1,
                   features=None, keep_embeddings=False):
    """ Node classification accuracy over seeds

    Arguments:
        dataset (NodeDataset): Labelled graph; its masks are used when set,
            otherwise the configured split is drawn with split_seed
        cfg (AugmentConfig): Model settings
        seeds (list): Root seeds, one trained model each
        train_config (TrainConfig): Optimisation settings
        split_seed (int): Seed of the node split
        jobs (int): Worker processes
        features (array, optional): Precomputed structural features
        keep_embeddings (bool): Keep the first seed's node embeddings

    Returns:
        ClassificationReport

    Raises:
        ConfigurationError: No node labels or an empty train or test split
    """
    if not isinstance(dataset, NodeDataset):
        raise ConfigurationError("Node classification needs a NodeDataset")
    if dataset.node_labels is None:
        raise ConfigurationError("Dataset '{}' has no node labels".format(dataset.name))
    cfg = AugmentConfig() if cfg is None else cfg
    train_config = TrainConfig() if train_config is None else train_config
    seeds = _check_seeds(seeds)

    dataset = _node_dataset_split(dataset, cfg.split, split_seed)
    rows = {'train': np.flatnonzero(dataset.train_mask), 'val': np.flatnonzero(dataset.val_mask),
            'test': np.flatnonzero(dataset.test_mask)}
    if not rows['train'].size or not rows['test'].size:
        raise ConfigurationError("Dataset '{}' has an empty train or test split".format(dataset.name))

    x, extra_dim = model_inputs(dataset, cfg.members, rows['train'], features)
    gnn = cfg.layer_config(NODE_MODE).replace(out_dim=dataset.num_classes)
    name = dataset.name or 'dataset'

    jobs_list = []
    for position, seed in enumerate(seeds):
        model_seed = derive_seed(seed, 'classify', name)
        jobs_list.append((dataset.graph, x, dataset.node_labels, rows, cfg.members, cfg, gnn,
                          extra_dim, model_seed, train_config, "{}#{}".format(name, seed),
                          keep_embeddings and position == 0))
    outcomes = run_tasks(_node_job, jobs_list, jobs)

    report = ClassificationReport(name, NODE_MODE, _run_config(cfg, NODE_MODE, train_config, split_seed),
                                  seeds, [value for value, _, _ in outcomes],
                                  embeddings=outcomes[0][1],
                                  embedding_labels=dataset.node_labels if keep_embeddings else None,
                                  histories=[history for _, _, history in outcomes])
    LOGGER.info("%r", report)
    return report


#
# Graph classification
#
class GraphPart(object):
    """ A subset of graphs batched into one union with its readout """

    def __init__(self, collection, inputs, indices, readout):
        indices = [int(i) for i in indices]
        batch = GraphBatch([collection.graphs[i] for i in indices])
        self.graph = batch.graph
        self.x = np.concatenate([inputs[i] for i in indices])
        self.pooling = batch.pooling_matrix(readout)
        self.labels = collection.graph_labels[indices]
        self.indices = indices


def graph_trainer_closures(model, parts):
    """ (loss_fn, evaluate_fn) training on parts['train'] and scoring every part """

    def loss_fn():
        train = parts['train']
        return ops.nll_loss(forward(model, train.graph, train.x, True, train.pooling), train.labels)

    def evaluate_fn():
        scores = {}
        for name, part in parts.items():
            predictions = predict(forward(model, part.graph, part.x, False, part.pooling))
            scores[name] = accuracy(predictions, part.labels)
        return scores

    return loss_fn, evaluate_fn


def _fold_job(job):
    """ Worker entry point: one seeded model on one fold """
    parts, members, cfg, gnn, extra_dim, seed, train_config, label, everything = job
    model = CombinationModel(len(members), cfg.concat_method, cfg.embed_dim, extra_dim, gnn, seed)
    loss_fn, evaluate_fn = graph_trainer_closures(model, parts)
    result = Trainer(train_config, label=label).fit(model, loss_fn, evaluate_fn)
    embeddings = None
    if everything is not None:
        embeddings = model.embed(everything.graph, everything.x, everything.pooling).data
    return result.val_accuracy, result.test_accuracy, embeddings, result.history


def classify_graphs(collection, cfg=None, seeds=(0,), train_config=None, split_seed=0, jobs=1,
                    features=None, keep_embeddings=False):
    """ Graph classification accuracy over seeds

    The graphs are split 8:1 into train and test with split_seed and the
    train graphs into cfg.num_folds cross validation folds.  Every fold
    trains a freshly seeded model; per seed the fold with the best
    validation accuracy (the earliest on ties) reports its test accuracy.

    Returns:
        ClassificationReport
    """
    if not isinstance(collection, GraphCollection):
        raise ConfigurationError("Graph classification needs a GraphCollection")
    cfg = AugmentConfig() if cfg is None else cfg
    train_config = TrainConfig() if train_config is None else train_config
    seeds = _check_seeds(seeds)
    name = collection.name or 'collection'

    train_graphs, test_graphs = graph_split(collection.num_graphs, GRAPH_RATIOS, seed=split_seed)
    folds = kfold(train_graphs, cfg.num_folds, seed=split_seed)

    sizes = [g.num_nodes for g in collection.graphs]
    membership = np.repeat(np.arange(collection.num_graphs), sizes)
    train_rows = np.flatnonzero(np.isin(membership, train_graphs))
    x, extra_dim = model_inputs(collection, cfg.members, train_rows, features)
    inputs = np.split(x, np.cumsum(sizes)[:-1])

    gnn = cfg.layer_config(GRAPH_MODE).replace(out_dim=collection.num_classes)
    test_part = GraphPart(collection, inputs, test_graphs, cfg.readout)
    everything = GraphPart(collection, inputs, range(collection.num_graphs), cfg.readout) \
        if keep_embeddings else None

    fold_parts = [{'train': GraphPart(collection, inputs, fold_train, cfg.readout),
                   'val': GraphPart(collection, inputs, fold_val, cfg.readout),
                   'test': test_part} for fold_train, fold_val in folds]

    jobs_list = []
    for position, seed in enumerate(seeds):
        for fold, parts in enumerate(fold_parts):
            model_seed = derive_seed(seed, 'classify', name, 'fold', fold)
            jobs_list.append((parts, cfg.members, cfg, gnn, extra_dim, model_seed, train_config,
                              "{}#{}/fold{}".format(name, seed, fold),
                              everything if position == 0 else None))
    outcomes = run_tasks(_fold_job, jobs_list, jobs)

    accuracies, fold_accuracies, histories, embeddings = [], [], [], None
    for position in range(len(seeds)):
        chunk = outcomes[position * len(folds):(position + 1) * len(folds)]
        best = int(np.argmax([outcome[0] for outcome in chunk]))
        accuracies.append(chunk[best][1])
        histories.append(chunk[best][3])
        fold_accuracies.append([outcome[1] for outcome in chunk])
        if position == 0 and keep_embeddings:
            embeddings = chunk[best][2]
        LOGGER.debug("%s seed %s: fold %s selected, test %.4f", name, seeds[position], best,
                     chunk[best][1])

    config = _run_config(cfg, GRAPH_MODE, train_config, split_seed)
    report = ClassificationReport(name, GRAPH_MODE, config, seeds, accuracies, fold_accuracies,
                                  embeddings,
                                  collection.graph_labels if keep_embeddings else None, histories)
    LOGGER.info("%r", report)
    return report


def classify(data, cfg=None, seeds=(0,), **kwargs):
    """ :func:`classify_nodes` or :func:`classify_graphs` by dataset type """
    if isinstance(data, NodeDataset):
        return classify_nodes(data, cfg, seeds, **kwargs)
    if isinstance(data, GraphCollection):
        return classify_graphs(data, cfg, seeds, **kwargs)
    raise ConfigurationError("Cannot classify a {}".format(type(data).__name__))


def write_report(report, path, embeddings_path=None):
    """ Write the JSON report and, when kept, the embedding TSV """
    report.to_json(path)
    if embeddings_path is not None and report.embeddings is not None:
        report.write_embeddings(embeddings_path)

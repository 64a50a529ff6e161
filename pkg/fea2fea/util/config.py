# Copyright (C) 2021 The fea2fea Authors. All Rights Reserved.
#
#     File:    config.py
#     Author:  fea2fea developers
#     Date:    2021-06-21
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
Run configuration

A run is described by one flat JSON document.  Keys not listed in
:data:`RunConfig.JSON_SCHEMA` are rejected, command line flags override
file values, and the resolved document is echoed to ``config.json`` in
the run directory so a run can be repeated exactly.

Dataset keys::

    dataset_type    synthetic | geometric_collection | edge_list | tudataset | linqs
    dataset_path    file (edge_list) or directory (tudataset, linqs)
    dataset_name    TUDataset prefix or LINQS name
    num_nodes       synthetic graph size
    radius          synthetic connection radius, null for the default
    num_graphs      geometric collection size
    node_range      geometric collection [min, max] node count
    radius_range    geometric collection [min, max] radius

Model, binning and pipeline keys map onto LayerConfig, TrainConfig,
BinningSpec and AugmentConfig.  ``seed`` is the root seed and
``num_seeds`` the number of repetitions derived from it.
"""

import copy
import logging
import os

# Third Party
import jsonschema

# This project
from fea2fea.exceptions import ConfigurationError, ExportError, GraphValidationError
from fea2fea.features.binning import STRATEGIES
from fea2fea.features.structural import FEATURE_NAMES, feature_index
from fea2fea.graph import (NodeDataset, generate_geometric_collection, generate_random_geometric,
                           load_edge_list, load_linqs, load_tudataset)
from fea2fea.nn import LayerConfig, MODEL_TYPES, TrainConfig
from fea2fea.pipeline.application import AugmentConfig
from .export import read_json, write_json
from .seeds import seed_list

LOGGER = logging.getLogger(__name__)

SCHEMA_VERSION = 1
CONFIG_FILE = 'config.json'

DATASET_TYPES = ('synthetic', 'geometric_collection', 'edge_list', 'tudataset', 'linqs')

_POSITIVE_INT = {'type': 'integer', 'minimum': 1}
_OPTIONAL_STR = {'type': ['string', 'null']}
_RANGE = {'type': 'array', 'items': {'type': 'number'}, 'minItems': 2, 'maxItems': 2}
_FEATURE = {'enum': list(FEATURE_NAMES)}


class RunConfig(object):
    """ Resolved settings of one command line run """

    JSON_SCHEMA = {
        'type': 'object',
        'additionalProperties': False,
        'properties': {
            'schema_version': {'enum': [SCHEMA_VERSION]},
            'dataset_type': {'enum': list(DATASET_TYPES)},
            'dataset_path': _OPTIONAL_STR,
            'dataset_name': _OPTIONAL_STR,
            'num_nodes': _POSITIVE_INT,
            'radius': {'type': ['number', 'null'], 'minimum': 0},
            'num_graphs': _POSITIVE_INT,
            'node_range': _RANGE,
            'radius_range': _RANGE,
            'conv_type': {'enum': [m.lower() for m in MODEL_TYPES] + list(MODEL_TYPES)},
            'hidden_dim': _POSITIVE_INT,
            'depth': _POSITIVE_INT,
            'dropout': {'type': 'number', 'minimum': 0, 'maximum': 1},
            'batchnorm': {'type': 'boolean'},
            'skip': {'type': 'boolean'},
            'num_bins': {'type': 'integer', 'minimum': 2},
            'binning_strategy': {'type': ['string', 'null'], 'enum': list(STRATEGIES) + [None]},
            'epochs': _POSITIVE_INT,
            'lr': {'type': 'number', 'minimum': 0},
            'weight_decay': {'type': 'number', 'minimum': 0},
            'patience': {'type': 'integer', 'minimum': 0},
            'seed': {'type': 'integer', 'minimum': 0},
            'num_seeds': _POSITIVE_INT,
            'split_seed': {'type': 'integer', 'minimum': 0},
            'threshold': {'type': 'number', 'minimum': 0, 'maximum': 1},
            'target': _FEATURE,
            'concat_methods': {'type': 'array', 'items': {'enum': ['simple', 'bilinear', 'ntn']},
                               'minItems': 1},
            'embed_dim': _POSITIVE_INT,
            'augment': {'type': 'array', 'items': _FEATURE, 'maxItems': 4},
            'concat_method': {'enum': ['simple', 'bilinear', 'ntn']},
            'readout': {'enum': ['mean', 'sum']},
            'classifier_conv': {'type': ['string', 'null'],
                                'enum': [m.lower() for m in MODEL_TYPES] + list(MODEL_TYPES) + [None]},
            'num_folds': {'type': 'integer', 'minimum': 2},
            'split': {'enum': ['ratio', 'planetoid']},
            'jobs': {'type': ['integer', 'null'], 'minimum': 1},
        },
    }

    DEFAULTS = {
        'schema_version': SCHEMA_VERSION,
        'dataset_type': 'synthetic',
        'dataset_path': None,
        'dataset_name': None,
        'num_nodes': 400,
        'radius': None,
        'num_graphs': 200,
        'node_range': [30, 60],
        'radius_range': [0.2, 0.45],
        'conv_type': LayerConfig.DEFAULT_CONV_TYPE,
        'hidden_dim': LayerConfig.DEFAULT_HIDDEN_DIM,
        'depth': LayerConfig.DEFAULT_DEPTH,
        'dropout': LayerConfig.DEFAULT_DROPOUT,
        'batchnorm': False,
        'skip': False,
        'num_bins': 6,
        'binning_strategy': None,
        'epochs': TrainConfig.DEFAULT_EPOCHS,
        'lr': TrainConfig.DEFAULT_LR,
        'weight_decay': TrainConfig.DEFAULT_WEIGHT_DECAY,
        'patience': TrainConfig.DEFAULT_PATIENCE,
        'seed': 0,
        'num_seeds': 3,
        'split_seed': 0,
        'threshold': 0.85,
        'target': 'pr',
        'concat_methods': ['simple', 'bilinear', 'ntn'],
        'embed_dim': 64,
        'augment': [],
        'concat_method': 'simple',
        'readout': 'mean',
        'classifier_conv': None,
        'num_folds': 10,
        'split': 'ratio',
        'jobs': None,
    }
    """Documented default of every key"""

    def __init__(self, values=None):
        """Constructor

        Arguments:
            values (dict, optional): Keys to change from :data:`DEFAULTS`

        Raises:
            ConfigurationError: Unknown keys or values of the wrong type
        """
        self._logger = logging.getLogger(__name__)
        document = copy.deepcopy(RunConfig.DEFAULTS)
        document.update(values or {})
        try:
            jsonschema.validate(document, RunConfig.JSON_SCHEMA)
        except jsonschema.ValidationError as error:
            message = "Invalid run configuration: {}".format(error.message)
            self._logger.error(message)
            raise ConfigurationError(message)
        self._values = document

    @classmethod
    def from_file(cls, path, overrides=None):
        """ Load a JSON file, then apply overrides whose value is not None

        Raises:
            ConfigurationError: Missing or malformed file, or invalid keys
        """
        values = {}
        if path is not None:
            if not os.path.isfile(path):
                message = "Configuration file '{}' does not exist".format(path)
                LOGGER.error(message)
                raise ConfigurationError(message)
            try:
                values = read_json(path)
            except ExportError as error:
                raise ConfigurationError(str(error))
            if not isinstance(values, dict):
                raise ConfigurationError("Configuration file '{}' is not a JSON object".format(path))
        values = dict(values)
        values.update((key, value) for key, value in (overrides or {}).items() if value is not None)
        return cls(values)

    def __getitem__(self, key):
        return self._values[key]

    def get(self, key, default=None):
        """ Value of key """
        return self._values.get(key, default)

    def to_dict(self):
        """ The resolved document """
        return copy.deepcopy(self._values)

    def write(self, run_dir):
        """ Echo the resolved document to ``<run_dir>/config.json`` """
        if not os.path.isdir(run_dir):
            os.makedirs(run_dir)
        path = os.path.join(run_dir, CONFIG_FILE)
        write_json(path, self.to_dict())
        return path

    #
    # Value objects
    #
    def layer_config(self, **changes):
        """ LayerConfig of the feature prediction models """
        cfg = LayerConfig(conv_type=self['conv_type'], hidden_dim=self['hidden_dim'],
                          depth=self['depth'], dropout_p=self['dropout'],
                          use_batchnorm=self['batchnorm'], use_skip=self['skip'])
        return cfg.replace(**changes) if changes else cfg

    def train_config(self):
        """ TrainConfig of every training run """
        return TrainConfig(epochs=self['epochs'], lr=self['lr'], weight_decay=self['weight_decay'],
                           patience=self['patience'])

    def seeds(self):
        """ num_seeds child seeds of the root seed """
        return seed_list(self['seed'], self['num_seeds'], 'repeat')

    def target_index(self):
        """ Column index of the target feature """
        return feature_index(self['target'])

    def augment_config(self, mode):
        """ AugmentConfig of the classification model for a node or graph task

        ``classifier_conv`` swaps the convolution of the default three block
        stack; null keeps GCN for node and GIN for graph tasks.
        """
        gnn = None
        if self['classifier_conv'] is not None:
            gnn = AugmentConfig.default_gnn(mode).replace(conv_type=self['classifier_conv'])
        return AugmentConfig(members=self['augment'], concat_method=self['concat_method'], gnn=gnn,
                             readout=self['readout'], embed_dim=self['embed_dim'],
                             num_folds=self['num_folds'], split=self['split'])

    def load_dataset(self):
        """ The configured dataset

        Returns:
            NodeDataset or GraphCollection

        Raises:
            GraphValidationError: Missing paths
            GraphFormatError: Files that do not parse
        """
        kind = self['dataset_type']
        path = self['dataset_path']
        if kind == 'synthetic':
            graph = generate_random_geometric(self['num_nodes'], self['radius'], self['seed'])
            return NodeDataset(graph, name="geometric-{}".format(self['num_nodes']))
        if kind == 'geometric_collection':
            return generate_geometric_collection(self['num_graphs'], tuple(self['node_range']),
                                                 tuple(self['radius_range']), self['seed'])

        if not path or not os.path.exists(path):
            message = "Dataset path '{}' does not exist".format(path)
            self._logger.error(message)
            raise GraphValidationError(message)
        if kind == 'edge_list':
            graph = load_edge_list(path)
            return NodeDataset(graph, name=os.path.splitext(os.path.basename(path))[0])
        if not self['dataset_name']:
            raise ConfigurationError("dataset_name is required for {} datasets".format(kind))
        if kind == 'tudataset':
            return load_tudataset(path, self['dataset_name'])
        return load_linqs(path, self['dataset_name'])

    def __repr__(self):
        return "<{} {} {}>".format(self.__class__.__name__, self['dataset_type'], self['conv_type'])

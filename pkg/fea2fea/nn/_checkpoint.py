# Copyright (C) 2021 The fea2fea Authors. All Rights Reserved.
#
#     File:    _checkpoint.py
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
Model checkpoints as JSON

Layout (``format_version`` 1)::

    {
      "format": "fea2fea-checkpoint",
      "format_version": 1,
      "config": {...LayerConfig fields...},
      "metadata": {...free form...},
      "tensors": [{"name": "stack.layers.0.linear.weight", "kind": "parameter",
                   "shape": [1, 64], "values": [...row-major...]}, ...]
    }

Floats are written with their shortest round-trip repr, so a reload is exact.
"""

import io
import json
import logging

# Third Party
import jsonschema
import numpy as np

# This project
from fea2fea.exceptions import EngineException

_LOGGER = logging.getLogger(__name__)

CHECKPOINT_FORMAT = 'fea2fea-checkpoint'
FORMAT_VERSION = 1

JSON_SCHEMA = {
    'type': 'object',
    'required': ['format', 'format_version', 'tensors'],
    'properties': {
        'format': {'enum': [CHECKPOINT_FORMAT]},
        'format_version': {'enum': [FORMAT_VERSION]},
        'config': {'type': 'object'},
        'metadata': {'type': 'object'},
        'tensors': {
            'type': 'array',
            'items': {
                'type': 'object',
                'required': ['name', 'kind', 'shape', 'values'],
                'properties': {
                    'name': {'type': 'string'},
                    'kind': {'enum': ['parameter', 'buffer']},
                    'shape': {'type': 'array', 'items': {'type': 'integer', 'minimum': 0}},
                    'values': {'type': 'array', 'items': {'type': 'number'}},
                },
            },
        },
    },
}


def save_checkpoint(model, path, metadata=None):
    """ Write every parameter and buffer of model to path """

    tensors = [{'name': name, 'kind': 'parameter', 'shape': list(p.shape),
                'values': p.data.ravel().tolist()} for name, p in model.named_parameters()]
    tensors += [{'name': name, 'kind': 'buffer', 'shape': list(b.shape),
                 'values': b.ravel().tolist()} for name, b in model.named_buffers()]
    config = getattr(model, 'config', None)
    document = {
        'format': CHECKPOINT_FORMAT,
        'format_version': FORMAT_VERSION,
        'config': config.to_dict() if config is not None else {},
        'metadata': metadata or {},
        'tensors': tensors,
    }
    with io.open(path, 'w', encoding='utf-8') as checkpoint_file:
        json.dump(document, checkpoint_file, sort_keys=True)
    _LOGGER.info("Saved %s tensors to '%s'", len(tensors), path)


def read_checkpoint(path):
    """ Validated checkpoint document

    Raises:
        EngineException: Unreadable file, wrong format or version, or a
            tensor whose value count does not match its shape
    """
    try:
        with io.open(path, 'r', encoding='utf-8') as checkpoint_file:
            document = json.load(checkpoint_file)
        jsonschema.validate(document, JSON_SCHEMA)
    except (IOError, ValueError) as error:
        message = "Cannot read checkpoint '{}': {}".format(path, error)
        _LOGGER.error(message)
        raise EngineException(message)
    except jsonschema.ValidationError as error:
        message = "Invalid checkpoint '{}': {}".format(path, error.message)
        _LOGGER.error(message)
        raise EngineException(message)

    for tensor in document['tensors']:
        if int(np.prod(tensor['shape'])) != len(tensor['values']):
            raise EngineException("Tensor '{}' has {} values for shape {}".format(
                tensor['name'], len(tensor['values']), tensor['shape']))
    return document


def load_checkpoint(model, path):
    """ Restore model from path in place and return the checkpoint metadata """

    document = read_checkpoint(path)
    state = dict((t['name'], np.array(t['values'], dtype=np.float64).reshape(t['shape']))
                 for t in document['tensors'])
    model.load_state_dict(state)
    return document.get('metadata', {})

# Copyright (C) 2021 The fea2fea Authors. All Rights Reserved.
#
#     File:    binning.py
#     Author:  fea2fea developers
#     Date:    2021-06-04
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
Turning a feature column into class labels

Bins are right-closed: a value v lands in the first bin whose upper
boundary is >= v.  Values past the last boundary clamp into the last bin
and values below the first boundary land in bin 0.
"""

import json
import logging

# Third Party
import jsonschema
import numpy as np

# This project
from fea2fea.exceptions import BinningError, DegenerateFeatureError
from .structural import CONS, DEG, CLU, PR, AVGLEN, FEATURE_NAMES

_LOGGER = logging.getLogger(__name__)

EQUAL_WIDTH = 'equal-width'
EQUAL_FREQUENCY = 'equal-frequency'
ZERO_INFLATED = 'zero-inflated'
STRATEGIES = (EQUAL_WIDTH, EQUAL_FREQUENCY, ZERO_INFLATED)

DEFAULT_STRATEGIES = {
    CONS: EQUAL_FREQUENCY,
    DEG: ZERO_INFLATED,
    CLU: ZERO_INFLATED,
    PR: EQUAL_FREQUENCY,
    AVGLEN: EQUAL_FREQUENCY,
}
"""Per feature default: spiky Deg/Clu reserve a bin, PR/AvgLen use quantiles"""

JSON_SCHEMA = {
    'type': 'object',
    'additionalProperties': False,
    'required': ['strategy', 'num_bins', 'boundaries'],
    'properties': {
        'strategy': {'enum': list(STRATEGIES)},
        'num_bins': {'type': 'integer', 'minimum': 2, 'maximum': 64},
        'spike_value': {'type': ['number', 'null']},
        'boundaries': {
            'type': ['array', 'null'],
            'items': {'type': 'number'},
        },
    },
}


class BinningSpec(object):
    """
    Binning configuration plus, once fitted, its boundaries

    Attributes:
        num_bins (int): Requested bin count B, 1 < B <= 64
        strategy (str): One of :data:`STRATEGIES`
        spike_value (float): Value reserved for bin 0 by zero-inflated binning.  A column
            without the spike value is split by quantiles into B bins instead, so
            bin 0 is never left empty
        boundaries (numpy.ndarray): Ascending upper bin edges, None until fitted
    """

    DEFAULT_NUM_BINS = 6
    """Default number of bins"""

    MAX_NUM_BINS = 64
    """Largest supported bin count"""

    DEFAULT_STRATEGY = EQUAL_FREQUENCY
    """Default strategy"""

    DEFAULT_SPIKE_VALUE = 0.0
    """Default spike reserved by zero-inflated binning"""

    def __init__(self, num_bins=None, strategy=None, spike_value=None, boundaries=None):

        if num_bins is None:
            num_bins = BinningSpec.DEFAULT_NUM_BINS
        if not 1 < int(num_bins) <= BinningSpec.MAX_NUM_BINS:
            raise BinningError("Bin count must be in 2..{}, got {}".format(
                BinningSpec.MAX_NUM_BINS, num_bins))
        self.num_bins = int(num_bins)

        if strategy is None:
            strategy = BinningSpec.DEFAULT_STRATEGY
        if strategy not in STRATEGIES:
            raise BinningError("Unknown binning strategy '{}'".format(strategy))
        self.strategy = strategy

        if spike_value is None:
            spike_value = BinningSpec.DEFAULT_SPIKE_VALUE
        self.spike_value = float(spike_value)

        if boundaries is not None:
            boundaries = np.array(boundaries, dtype=np.float64)
            if boundaries.ndim != 1 or not boundaries.size or np.any(np.diff(boundaries) <= 0):
                raise BinningError("Boundaries must be a non-empty strictly ascending vector")
            if boundaries.shape[0] > self.num_bins:
                raise BinningError("{} boundaries for {} bins".format(boundaries.shape[0], self.num_bins))
            boundaries.setflags(write=False)
        self.boundaries = boundaries

    @classmethod
    def for_feature(cls, feature, num_bins=None):
        """ Unfitted spec with the default strategy of a feature index """
        return cls(num_bins=num_bins, strategy=DEFAULT_STRATEGIES[feature])

    @property
    def fitted(self):
        """ True once boundaries are known """
        return self.boundaries is not None

    @property
    def num_classes(self):
        """ Labels actually produced; ties can merge quantile bins """
        return self.boundaries.shape[0] if self.fitted else self.num_bins

    def to_dict(self):
        """ JSON-ready representation """
        return {
            'strategy': self.strategy,
            'num_bins': self.num_bins,
            'spike_value': self.spike_value,
            'boundaries': None if self.boundaries is None else [float(x) for x in self.boundaries],
        }

    def to_json(self):
        """ Stable JSON document """
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, document):
        """ Validate and rebuild a spec from :meth:`to_dict` output """

        try:
            jsonschema.validate(document, JSON_SCHEMA)
        except jsonschema.ValidationError as error:
            raise BinningError("Invalid binning document: {}".format(error.message))
        return cls(document['num_bins'], document['strategy'],
                   document.get('spike_value'), document['boundaries'])

    @classmethod
    def from_json(cls, text):
        """ Inverse of :meth:`to_json` """
        return cls.from_dict(json.loads(text))

    def __eq__(self, other):
        if not isinstance(other, BinningSpec):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def __ne__(self, other):
        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    __hash__ = None

    def __repr__(self):
        return "<{} {} B={} boundaries={}>".format(
            self.__class__.__name__, self.strategy, self.num_bins,
            None if self.boundaries is None else np.round(self.boundaries, 4).tolist())


def _quantile_edges(values, num_bins):
    """ Upper edges at the 1/B .. (B-1)/B quantiles plus the maximum, deduplicated """

    inner = np.quantile(values, np.arange(1, num_bins) / float(num_bins))
    return np.unique(np.append(inner, values.max()))


def fit_bins(values, spec):
    """ Compute boundaries for values under spec

    Arguments:
        values (array-like): Non-empty feature column
        spec (BinningSpec): Strategy and bin count

    Returns:
        BinningSpec: a fitted copy of spec

    Raises:
        DegenerateFeatureError: Every value is identical
        BinningError: Empty input or negative values for zero-inflated
    """
    values = np.asarray(values, dtype=np.float64).ravel()
    if not values.size:
        raise BinningError("Cannot fit bins on an empty column")

    low, high = values.min(), values.max()
    if low == high:
        message = ("Feature column is constant ({}); it cannot be split into {} bins. "
                   "Remove this feature from the prediction task.").format(low, spec.num_bins)
        _LOGGER.warning(message)
        raise DegenerateFeatureError(message)

    if spec.strategy == EQUAL_WIDTH:
        boundaries = low + (high - low) * np.arange(1, spec.num_bins + 1) / float(spec.num_bins)
        boundaries[-1] = high

    elif spec.strategy == EQUAL_FREQUENCY:
        boundaries = _quantile_edges(values, spec.num_bins)

    else:
        if low < 0:
            raise BinningError("Zero-inflated binning needs non-negative values, min is {}".format(low))
        spike = spec.spike_value
        rest = values[values != spike]
        # bin 0 holds everything <= spike; with the spike at the minimum that is the spike alone
        if rest.size == values.size:
            # no spike to reserve a bin for, so all B bins go to quantiles
            boundaries = _quantile_edges(values, spec.num_bins)
            _LOGGER.debug("Spike value %s absent from the column; using quantiles", spike)
        elif np.all(rest > spike):
            boundaries = np.append([spike], _quantile_edges(rest, spec.num_bins - 1))
        else:
            boundaries = _quantile_edges(values, spec.num_bins)
            _LOGGER.warning("Spike value %s is not the column minimum; falling back to quantiles",
                            spike)

    fitted = BinningSpec(spec.num_bins, spec.strategy, spec.spike_value, np.unique(boundaries))
    _LOGGER.debug("Fitted %r", fitted)
    return fitted


def apply_bins(values, spec):
    """ Class id per value under a fitted spec

    Raises:
        BinningError: The spec has no boundaries yet
    """
    if not spec.fitted:
        raise BinningError("Binning spec must be fitted before it is applied")

    values = np.asarray(values, dtype=np.float64)
    labels = np.searchsorted(spec.boundaries, values, side='left')
    return np.minimum(labels, spec.boundaries.shape[0] - 1).astype(np.int64)


def default_specs(num_bins=None):
    """ Unfitted default spec per feature name """
    return dict((name, BinningSpec.for_feature(index, num_bins))
                for index, name in enumerate(FEATURE_NAMES))

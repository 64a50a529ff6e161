# Copyright (C) 2021 The fea2fea Authors. All Rights Reserved.
#
#     File:    entry.py
#     Author:  fea2fea developers
#     Date:    2021-06-11
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
Our standard result cell
"""

# Third Party
import numpy as np

# This project
from fea2fea.exceptions import PipelineException
from fea2fea.features.structural import FEATURE_NAMES


class CorrelationEntry(object):
    """
    One cell of the correlation matrix together with how it was obtained

    An entry is either trained (it carries one accuracy per seed) or
    excluded (it carries the reason, and no value).
    """

    def __init__(self, input_idx, output_idx, accuracies=None, excluded_reason=None):

        self._input_idx = int(input_idx)
        self._output_idx = int(output_idx)
        self._accuracies = tuple(float(a) for a in (accuracies or ()))
        self._excluded_reason = excluded_reason

        if excluded_reason is None and not self._accuracies:
            raise PipelineException("A trained entry needs at least one accuracy")

    @classmethod
    def excluded(cls, input_idx, output_idx, reason):
        """ An entry that could not be trained """
        return cls(input_idx, output_idx, excluded_reason=reason)

    @property
    def input_idx(self):
        """ Row: the predicting feature """
        return self._input_idx

    @property
    def output_idx(self):
        """ Column: the predicted feature """
        return self._output_idx

    @property
    def is_excluded(self):
        """ True when no model could be trained for this pair """
        return self._excluded_reason is not None

    @property
    def reason(self):
        """ Why the entry is excluded, None for trained entries """
        return self._excluded_reason

    @property
    def accuracies(self):
        """ Test accuracy per seed """
        return self._accuracies

    @property
    def value(self):
        """ Mean accuracy over seeds, NaN when excluded """
        if self.is_excluded:
            return float('nan')
        return float(np.mean(self._accuracies))

    @property
    def std(self):
        """ Population standard deviation over seeds, NaN when excluded """
        if self.is_excluded:
            return float('nan')
        return float(np.std(self._accuracies))

    def mirrored(self, input_idx, output_idx):
        """ Same measurements filed under another cell """
        return CorrelationEntry(input_idx, output_idx, self._accuracies, self._excluded_reason)

    def to_dict(self):
        """ JSON-ready representation """
        return {
            'input': FEATURE_NAMES[self._input_idx],
            'output': FEATURE_NAMES[self._output_idx],
            'accuracies': list(self._accuracies),
            'mean': None if self.is_excluded else self.value,
            'std': None if self.is_excluded else self.std,
            'excluded': self.is_excluded,
            'reason': self._excluded_reason,
        }

    @classmethod
    def from_dict(cls, document):
        """ Inverse of :meth:`to_dict` """
        return cls(FEATURE_NAMES.index(document['input']), FEATURE_NAMES.index(document['output']),
                   document.get('accuracies'), document.get('reason') if document.get('excluded') else None)

    def __str__(self):
        if self.is_excluded:
            return "excluded"
        return "{:.3f} +/- {:.3f}".format(self.value, self.std)

    def __repr__(self):
        return "<{} {} -> {} {}>".format(self.__class__.__name__,
                                         FEATURE_NAMES[self._input_idx],
                                         FEATURE_NAMES[self._output_idx],
                                         self)

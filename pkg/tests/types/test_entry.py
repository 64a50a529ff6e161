# Copyright (C) 2021 The fea2fea Authors. All Rights Reserved.
#
#     File:    test_entry.py
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

#
# Imports
#

# core python
import math

# third party
import pytest

# this project
from fea2fea.exceptions import PipelineException
from fea2fea.types import CorrelationEntry

#
# Tests
#


def test_trained_entry():
    """Mean and population deviation over seeds"""
    entry = CorrelationEntry(1, 2, [0.5, 0.7])
    assert not entry.is_excluded
    assert entry.reason is None
    assert entry.value == pytest.approx(0.6)
    assert entry.std == pytest.approx(0.1)
    assert str(entry) == "0.600 +/- 0.100"
    assert repr(entry) == "<CorrelationEntry deg -> clu 0.600 +/- 0.100>"


def test_excluded_entry():
    """Excluded entries have no value"""
    entry = CorrelationEntry.excluded(2, 2, "clu takes a single value")
    assert entry.is_excluded
    assert math.isnan(entry.value) and math.isnan(entry.std)
    assert entry.accuracies == ()
    assert str(entry) == "excluded"
    document = entry.to_dict()
    assert document['mean'] is None
    assert document['reason'] == "clu takes a single value"


def test_needs_an_accuracy():
    """A trained entry without measurements is refused"""
    with pytest.raises(PipelineException):
        CorrelationEntry(0, 1, [])


def test_dict_round_trip_and_mirror():
    """to_dict and from_dict agree; mirrored keeps the measurements"""
    entry = CorrelationEntry(3, 4, [0.25, 0.75, 0.5])
    again = CorrelationEntry.from_dict(entry.to_dict())
    assert (again.input_idx, again.output_idx, again.accuracies) == (3, 4, (0.25, 0.75, 0.5))

    mirror = entry.mirrored(0, 3)
    assert (mirror.input_idx, mirror.output_idx) == (0, 3)
    assert mirror.accuracies == entry.accuracies

    excluded = CorrelationEntry.from_dict(CorrelationEntry.excluded(0, 2, "constant").to_dict())
    assert excluded.is_excluded and excluded.reason == "constant"

# Copyright (C) 2021 The fea2fea Authors. All Rights Reserved.
#
#     File:    test_export.py
#     Author:  fea2fea developers
#     Date:    2021-06-14
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
import io

# third party
import numpy as np
import pytest

# this project
from fea2fea.exceptions import ExportError
from fea2fea.util.export import (read_csv, read_json, write_csv, write_embeddings, write_history,
                                 write_json)

#
# Tests
#


def test_json_is_sorted_and_newline_terminated(tmp_path):
    """Keys are sorted, indented by two and the file ends with a newline"""

    path = str(tmp_path / 'doc.json')
    write_json(path, {'b': 1, 'a': [1, 2]})

    with io.open(path, encoding='utf-8') as json_file:
        text = json_file.read()
    assert text == u'{\n  "a": [\n    1,\n    2\n  ],\n  "b": 1\n}\n'
    assert read_json(path) == {'a': [1, 2], 'b': 1}


def test_json_errors(tmp_path):
    """Unreadable, malformed and unserialisable documents raise ExportError"""

    with pytest.raises(ExportError):
        read_json(str(tmp_path / 'missing.json'))

    garbled = tmp_path / 'garbled.json'
    garbled.write_text(u'{')
    with pytest.raises(ExportError):
        read_json(str(garbled))

    with pytest.raises(ExportError):
        write_json(str(tmp_path / 'set.json'), {'value': set([1])})

    with pytest.raises(ExportError):
        write_json(str(tmp_path / 'missing' / 'doc.json'), {})


def test_csv_cells(tmp_path):
    """Floats get six decimals, NaN reads excluded and None is empty"""

    path = str(tmp_path / 'table.csv')
    rows = [
        {'name': 'deg', 'value': 0.5, 'count': 3, 'ignored': 'x'},
        {'name': 'clu', 'value': float('nan'), 'count': None},
        {'name': 'pr', 'value': np.float64(1.0 / 3.0), 'count': 0},
    ]
    write_csv(path, ('name', 'value', 'count'), rows)

    with io.open(path, encoding='utf-8', newline='') as csv_file:
        text = csv_file.read()
    assert text == (u"name,value,count\n"
                    u"deg,0.500000,3\n"
                    u"clu,excluded,\n"
                    u"pr,0.333333,0\n")

    assert read_csv(path)[1] == {'name': 'clu', 'value': 'excluded', 'count': ''}


def test_history(tmp_path):
    """The history table has one row per epoch"""

    path = str(tmp_path / 'history.csv')
    write_history(path, [
        {'epoch': 1, 'loss': 1.0, 'train_accuracy': 0.5, 'val_accuracy': 0.25, 'test_accuracy': None},
        {'epoch': 2, 'loss': 0.5, 'train_accuracy': 0.75, 'val_accuracy': 0.5, 'test_accuracy': None},
    ])

    rows = read_csv(path)
    assert [row['epoch'] for row in rows] == ['1', '2']
    assert rows[1]['loss'] == '0.500000'
    assert rows[1]['test_accuracy'] == ''


def test_embeddings(tmp_path):
    """Tab separated rows with the label last"""

    path = str(tmp_path / 'embeddings.tsv')
    write_embeddings(path, np.array([[0.0, 1.5], [-2.0, 0.25]]), labels=np.array([1, 0]))

    with io.open(path, encoding='utf-8') as tsv_file:
        lines = tsv_file.read().splitlines()
    assert lines == [u"0.000000\t1.500000\t1", u"-2.000000\t0.250000\t0"]

    write_embeddings(path, np.zeros((1, 2)))
    with io.open(path, encoding='utf-8') as tsv_file:
        assert tsv_file.read() == u"0.000000\t0.000000\n"


def test_embeddings_label_mismatch(tmp_path):
    """One label per row"""

    with pytest.raises(ExportError):
        write_embeddings(str(tmp_path / 'embeddings.tsv'), np.zeros((3, 2)), labels=[0, 1])

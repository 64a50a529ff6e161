# Copyright (C) 2021 The fea2fea Authors. All Rights Reserved.
#
#     File:    export.py
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
Result files

Every writer produces the same bytes for the same input: JSON is key
sorted with a trailing newline, CSV uses ``\\n`` line ends and floats are
printed with a fixed precision.
"""

import csv
import io
import json
import logging

# Third Party
import numpy as np

# This project
from fea2fea.exceptions import ExportError

LOGGER = logging.getLogger(__name__)

FLOAT_FORMAT = "{:.6f}"


def _cell(value):
    """ CSV text of one value """
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return "excluded" if np.isnan(value) else FLOAT_FORMAT.format(value)
    return value


def write_json(path, document):
    """ Write document as indented, key sorted JSON

    Raises:
        ExportError: The file cannot be written
    """
    try:
        with io.open(path, 'w', encoding='utf-8') as json_file:
            json.dump(document, json_file, indent=2, sort_keys=True)
            json_file.write(u"\n")
    except (IOError, OSError, TypeError) as error:
        message = "Cannot write '{}': {}".format(path, error)
        LOGGER.error(message)
        raise ExportError(message)
    LOGGER.debug("Wrote %s", path)


def read_json(path):
    """ Parse a JSON file

    Raises:
        ExportError: Missing or malformed file
    """
    try:
        with io.open(path, 'r', encoding='utf-8') as json_file:
            return json.load(json_file)
    except (IOError, OSError, ValueError) as error:
        message = "Cannot read '{}': {}".format(path, error)
        LOGGER.error(message)
        raise ExportError(message)


def write_csv(path, fieldnames, rows):
    """ Write dict rows under a header row

    Floats get six decimals and NaN reads ``excluded``; keys outside
    fieldnames are ignored.
    """
    try:
        with io.open(path, 'w', encoding='utf-8', newline='') as csv_file:
            writer = csv.DictWriter(csv_file, fieldnames=list(fieldnames), extrasaction='ignore',
                                    lineterminator="\n")
            writer.writeheader()
            for row in rows:
                writer.writerow(dict((key, _cell(value)) for key, value in row.items()))
    except (IOError, OSError) as error:
        message = "Cannot write '{}': {}".format(path, error)
        LOGGER.error(message)
        raise ExportError(message)
    LOGGER.debug("Wrote %s", path)


def read_csv(path):
    """ Rows of a CSV file as dicts of strings """
    try:
        with io.open(path, 'r', encoding='utf-8', newline='') as csv_file:
            return list(csv.DictReader(csv_file))
    except (IOError, OSError) as error:
        message = "Cannot read '{}': {}".format(path, error)
        LOGGER.error(message)
        raise ExportError(message)


def write_history(path, history):
    """ Per epoch loss and accuracies of a training run """
    write_csv(path, ('epoch', 'loss', 'train_accuracy', 'val_accuracy', 'test_accuracy'), history)


def write_embeddings(path, embeddings, labels=None):
    """ One tab separated row per node or graph, the label last when given

    Raises:
        ExportError: labels do not match the rows
    """
    embeddings = np.asarray(embeddings, dtype=np.float64)
    if labels is not None and len(labels) != embeddings.shape[0]:
        raise ExportError("Got {} labels for {} embeddings".format(len(labels), embeddings.shape[0]))
    try:
        with io.open(path, 'w', encoding='utf-8', newline='\n') as tsv_file:
            for index, row in enumerate(embeddings):
                cells = [FLOAT_FORMAT.format(value) for value in row]
                if labels is not None:
                    cells.append(str(int(labels[index])))
                tsv_file.write(u"\t".join(cells) + u"\n")
    except (IOError, OSError) as error:
        message = "Cannot write '{}': {}".format(path, error)
        LOGGER.error(message)
        raise ExportError(message)


COMBINATION_FIELDS = ('target', 'members', 'k', 'concat_method', 'accuracy', 'std', 'excluded_reason')
SUMMARY_FIELDS = ('target', 'k', 'concat_method', 'count', 'mean', 'std')


def combination_rows(results):
    """ Flat CSV rows, one per combination and method """
    rows = []
    for result in results:
        document = result.to_dict()
        rows.append({
            'target': document['target_name'],
            'members': "+".join(document['member_names']),
            'k': document['k'],
            'concat_method': document['concat_method'],
            'accuracy': document['accuracy'],
            'std': document['std'],
            'excluded_reason': document['excluded_reason'],
        })
    return rows

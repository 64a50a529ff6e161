# Copyright (C) 2021 The fea2fea Authors. All Rights Reserved.
#
#     File:    seeds.py
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

"""
Seed splitting and stable hashing

Every random decision of a run descends from one root seed::

    derive_seed(root, 'single', 'pr', 'avglen', 2)
        == int.from_bytes(sha256(b"<root>/single/pr/avglen/2")[:4], 'big')

so child seeds do not depend on scheduling order or on how many other
tasks exist.
"""

import hashlib
import json


def derive_seed(root, *labels):
    """ 32 bit child seed of root for the path of labels """

    path = "/".join(str(part) for part in (root,) + labels)
    return int.from_bytes(hashlib.sha256(path.encode('utf-8')).digest()[:4], 'big')


def seed_list(root, count, *labels):
    """ count child seeds, one per repetition index """
    return [derive_seed(root, *(labels + (index,))) for index in range(count)]


def canonical_json(value):
    """ Key sorted, whitespace free JSON """
    return json.dumps(value, sort_keys=True, separators=(",", ":"))


def config_hash(value):
    """ sha256 hex digest of the canonical JSON of value """
    return hashlib.sha256(canonical_json(value).encode('utf-8')).hexdigest()

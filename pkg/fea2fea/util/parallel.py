# Copyright (C) 2021 The fea2fea Authors. All Rights Reserved.
#
#     File:    parallel.py
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

""" Bounded task parallelism over independent training runs """

import logging
import os
from concurrent.futures import ProcessPoolExecutor

LOGGER = logging.getLogger(__name__)


def default_jobs():
    """ Number of available cores """
    return os.cpu_count() or 1


def run_tasks(function, tasks, jobs=None):
    """ Apply function to every task, in up to jobs worker processes

    Results come back in task order whatever the completion order, so the
    output does not depend on jobs.  function and the tasks must pickle.

    Arguments:
        function (callable): Module level function of one task
        tasks (list): Task arguments
        jobs (int, optional): Worker count, defaults to :func:`default_jobs`;
            1 runs in this process
    """
    tasks = list(tasks)
    if jobs is None:
        jobs = default_jobs()
    jobs = max(1, min(int(jobs), len(tasks)))

    if jobs == 1:
        return [function(task) for task in tasks]

    LOGGER.debug("Running %s tasks on %s workers", len(tasks), jobs)
    with ProcessPoolExecutor(max_workers=jobs) as executor:
        return list(executor.map(function, tasks))

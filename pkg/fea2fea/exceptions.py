# Copyright (C) 2021 The fea2fea Authors. All Rights Reserved.
#
#     File:    exceptions.py
#     Author:  fea2fea developers
#     Date:    2021-06-02
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
Exceptions for this project
"""


class Fea2FeaException(Exception):
    """ Parent exception for all exceptions from this library """

# *****************************************************************
# Graph storage and ingestion
# *****************************************************************

class GraphException(Fea2FeaException):
    """ Base exception for graph construction and loading """


class GraphFormatError(GraphException):
    """ For files that do not parse """

    def __init__(self, message, path=None, line_number=None):
        super(GraphFormatError, self).__init__(message)
        self.message = message
        self.path = path
        self.line_number = line_number


class GraphValidationError(GraphException):
    """ For graphs and datasets that break their invariants """

#
# Structural features
#
class FeatureException(Fea2FeaException):
    """ Base exception for structural feature extraction """


class PageRankConvergenceError(FeatureException):
    """ Power iteration did not settle within the iteration budget """

    def __init__(self, message, residual=None, iterations=None):
        super(PageRankConvergenceError, self).__init__(message)
        self.message = message
        self.residual = residual
        self.iterations = iterations


class BinningError(FeatureException):
    """ For binning specs that cannot be fitted or applied """


class DegenerateFeatureError(BinningError):
    """ The feature column has a single value and cannot be split into bins """

#
# Tensor engine
#
class EngineException(Fea2FeaException):
    """ Base exception for the tensor engine """


class ShapeError(EngineException):
    """ For operands whose shapes do not line up """

    def __init__(self, message, left=None, right=None):
        super(ShapeError, self).__init__(message)
        self.message = message
        self.left = left
        self.right = right


class TargetRangeError(EngineException):
    """ For class targets outside of [0, C) """

#
# Training
#
class TrainingException(Fea2FeaException):
    """ Base exception for model training """


class TrainingDivergedError(TrainingException):
    """ The loss stopped being a finite number """

#
# Pipelines
#
class PipelineException(Fea2FeaException):
    """ Base class for pipeline problems """


class ConfigurationError(PipelineException):
    """ For configuration errors """


class CombinationError(PipelineException):
    """ For feature combinations that cannot be built """


class ExportError(PipelineException):
    """ For result files that cannot be written or read back """

# Copyright (C) 2021 The fea2fea Authors. All Rights Reserved.
#
#     File:    _tensor.py
#     Author:  fea2fea developers
#     Date:    2021-06-07
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
Dense tensors and the tape that records them for reverse-mode
differentiation.

Operations only record themselves while a :class:`Tape` is active (``with
Tape() as tape:``) and at least one operand requires a gradient.  Outside
of a tape every operation is a plain numpy computation, which is how
evaluation runs.
"""

import threading

# Third Party
import numpy as np

# This project
from fea2fea.exceptions import EngineException

_STATE = threading.local()


def _tape_stack():
    """ Per thread stack of active tapes """
    if not hasattr(_STATE, 'tapes'):
        _STATE.tapes = []
    return _STATE.tapes


def active_tape():
    """ The innermost active tape of this thread, or None """
    stack = _tape_stack()
    return stack[-1] if stack else None


class Tape(object):
    """
    Ordered record of the operations of one forward pass

    Tensors are appended in creation order, which is a topological order,
    so :meth:`backward` walks the record in reverse and runs every node's
    backward function exactly once.
    """

    def __init__(self):
        self._nodes = []

    def __enter__(self):
        _tape_stack().append(self)
        return self

    def __exit__(self, exc_type, exc_value, traceback):
        stack = _tape_stack()
        if stack and stack[-1] is self:
            stack.pop()
        return False

    def __len__(self):
        return len(self._nodes)

    def record(self, tensor):
        """ Append a freshly computed tensor """
        self._nodes.append(tensor)

    def backward(self, root, gradient=None):
        """ Propagate d(root)/d(node) back through every recorded node

        Arguments:
            root (Tensor): Usually the scalar loss
            gradient (numpy.ndarray, optional): Seed gradient, ones by default
        """
        if not root.requires_grad:
            raise EngineException("backward() on a tensor that does not require gradients")

        seed = np.ones_like(root.data) if gradient is None else np.asarray(gradient, dtype=np.float64)
        if seed.shape != root.data.shape:
            raise EngineException("Seed gradient shape {} does not match {}".format(
                seed.shape, root.data.shape))
        root.accumulate(seed)

        for node in reversed(self._nodes):
            if node.grad is not None and node.backward_fn is not None:
                node.backward_fn(node.grad)

        # The record is spent; later passes need a new tape
        self._nodes = []


class Tensor(object):
    """
    Row-major float64 array with an optional gradient

    Attributes:
        data (numpy.ndarray): Values
        requires_grad (bool): Whether gradients flow into this tensor
        grad (numpy.ndarray): Accumulated gradient, same shape as data, or None
    """

    def __init__(self, data, requires_grad=False, name=None):
        self.data = np.array(data, dtype=np.float64)
        self.requires_grad = bool(requires_grad)
        self.grad = None
        self.name = name
        self.parents = ()
        self.backward_fn = None
        self.tape = None

    @property
    def shape(self):
        """ Dimension tuple """
        return self.data.shape

    @property
    def ndim(self):
        """ Number of dimensions """
        return self.data.ndim

    @property
    def size(self):
        """ Number of elements """
        return self.data.size

    def numpy(self):
        """ Copy of the values """
        return self.data.copy()

    def accumulate(self, gradient):
        """ Add gradient into self.grad """
        if self.grad is None:
            self.grad = np.array(gradient, dtype=np.float64)
        else:
            self.grad = self.grad + gradient

    def zero_grad(self):
        """ Forget the accumulated gradient """
        self.grad = None

    def backward(self, gradient=None):
        """ Run the tape that produced this tensor back from here """
        if self.tape is None:
            raise EngineException("Tensor was not recorded on a tape")
        self.tape.backward(self, gradient)

    def detach(self):
        """ Same values, outside of any graph """
        return Tensor(self.data)

    # Operators delegate to fea2fea.nn._ops, imported lazily to avoid a cycle
    def __add__(self, other):
        from . import _ops
        return _ops.add(self, other)

    def __radd__(self, other):
        from . import _ops
        return _ops.add(other, self)

    def __sub__(self, other):
        from . import _ops
        return _ops.sub(self, other)

    def __rsub__(self, other):
        from . import _ops
        return _ops.sub(other, self)

    def __mul__(self, other):
        from . import _ops
        return _ops.mul(self, other)

    def __rmul__(self, other):
        from . import _ops
        return _ops.mul(other, self)

    def __neg__(self):
        from . import _ops
        return _ops.mul(self, -1.0)

    def __matmul__(self, other):
        from . import _ops
        return _ops.matmul(self, other)

    def __getitem__(self, index):
        from . import _ops
        return _ops.gather_rows(self, index)

    def __repr__(self):
        return "<{}{} shape={} requires_grad={}>".format(
            self.__class__.__name__, "" if self.name is None else " " + self.name,
            self.shape, self.requires_grad)


class Parameter(Tensor):
    """ A tensor that always requires gradients and belongs to a module """

    def __init__(self, data, name=None):
        super(Parameter, self).__init__(data, requires_grad=True, name=name)


def as_tensor(value):
    """ Wrap arrays and scalars, pass tensors through """
    if isinstance(value, Tensor):
        return value
    return Tensor(value)


def make_result(data, parents, backward_fn):
    """ Build an operation's output and record it when gradients are needed

    Arguments:
        data (numpy.ndarray): Forward value
        parents (tuple): Operand tensors
        backward_fn (callable): Receives the output gradient and accumulates
            into the parents that require gradients
    """
    needs_grad = any(parent.requires_grad for parent in parents)
    result = Tensor(data, requires_grad=needs_grad)
    tape = active_tape()
    if needs_grad and tape is not None:
        result.parents = parents
        result.backward_fn = backward_fn
        result.tape = tape
        tape.record(result)
    return result

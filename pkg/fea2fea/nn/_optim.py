# Copyright (C) 2021 The fea2fea Authors. All Rights Reserved.
#
#     File:    _optim.py
#     Author:  fea2fea developers
#     Date:    2021-06-08
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

""" Adam """

# Third Party
import numpy as np

DEFAULT_LR = 0.01
DEFAULT_BETAS = (0.9, 0.999)
DEFAULT_EPS = 1e-8


def adam_step(params, grads, state=None, lr=DEFAULT_LR, betas=DEFAULT_BETAS, eps=DEFAULT_EPS,
              weight_decay=0.0):
    """ One bias corrected Adam update

    Weight decay is added to the gradient (L2 penalty), as in the classic
    formulation.

    Arguments:
        params (list): numpy arrays
        grads (list): numpy arrays matching params; None means zero
        state (dict, optional): ``step``, ``m`` and ``v`` from a previous call

    Returns:
        tuple: (updated params, new state); inputs are left untouched
    """
    beta1, beta2 = betas
    if state is None:
        state = {'step': 0,
                 'm': [np.zeros_like(p) for p in params],
                 'v': [np.zeros_like(p) for p in params]}

    step = state['step'] + 1
    correction1 = 1.0 - beta1 ** step
    correction2 = 1.0 - beta2 ** step

    updated, first, second = [], [], []
    for param, grad, m, v in zip(params, grads, state['m'], state['v']):
        grad = np.zeros_like(param) if grad is None else grad
        if weight_decay:
            grad = grad + weight_decay * param
        m = beta1 * m + (1.0 - beta1) * grad
        v = beta2 * v + (1.0 - beta2) * grad * grad
        updated.append(param - lr * (m / correction1) / (np.sqrt(v / correction2) + eps))
        first.append(m)
        second.append(v)

    return updated, {'step': step, 'm': first, 'v': second}


class Adam(object):
    """
    Adam over a fixed parameter list, writing results back in place
    """

    DEFAULT_WEIGHT_DECAY = 5e-4

    def __init__(self, parameters, lr=None, betas=None, eps=None, weight_decay=None):
        self.parameters = list(parameters)
        self.lr = DEFAULT_LR if lr is None else float(lr)
        self.betas = DEFAULT_BETAS if betas is None else tuple(betas)
        self.eps = DEFAULT_EPS if eps is None else float(eps)
        self.weight_decay = Adam.DEFAULT_WEIGHT_DECAY if weight_decay is None else float(weight_decay)
        self.state = None

    def step(self):
        """ Apply the accumulated gradients """
        updated, self.state = adam_step([p.data for p in self.parameters],
                                        [p.grad for p in self.parameters],
                                        self.state, self.lr, self.betas, self.eps,
                                        self.weight_decay)
        for parameter, value in zip(self.parameters, updated):
            parameter.data[...] = value

    def zero_grad(self):
        """ Forget the gradients of every managed parameter """
        for parameter in self.parameters:
            parameter.zero_grad()

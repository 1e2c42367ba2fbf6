"""
Plain stochastic gradient descent under a triangular cyclical learning
rate schedule.
"""

import math

import numpy as np

from .base import ConfigurationError, ShapeError, TrainingError
from .mlp import Mlp


class ClrSchedule(object):
    """
    Triangular cyclical learning rate: the rate climbs linearly from
    base_lr to max_lr over step_size iterations, falls back over the next
    step_size, and repeats.
    """

    FIELDS = ('base_lr', 'max_lr', 'step_size')

    def __init__(self, base_lr=0.001, max_lr=0.005, step_size=5500):
        try:
            base_lr, max_lr, step = float(base_lr), float(max_lr), int(step_size)
        except (TypeError, ValueError):
            raise ConfigurationError("learning rates and step_size must be numbers, got %r, %r, %r"
                                     % (base_lr, max_lr, step_size))
        if step != step_size:
            raise ConfigurationError("step_size must be an integer, got %r" % (step_size,))
        if not (0 < base_lr <= max_lr):
            raise ConfigurationError("need 0 < base_lr <= max_lr, got %r, %r" % (base_lr, max_lr))
        if step < 1:
            raise ConfigurationError("step_size must be at least 1, got %r" % (step_size,))
        self.base_lr = base_lr
        self.max_lr = max_lr
        self.step_size = step

    def __repr__(self):
        return "ClrSchedule(%r, %r, %r)" % (self.base_lr, self.max_lr, self.step_size)

    def __eq__(self, other):
        return (isinstance(other, ClrSchedule) and self.to_dict() == other.to_dict())

    def to_dict(self):
        return {'base_lr': self.base_lr, 'max_lr': self.max_lr, 'step_size': self.step_size}

    @classmethod
    def from_dict(cls, d):
        if not isinstance(d, dict):
            raise ConfigurationError("clr must be an object, got %r" % (d,))
        unknown = sorted(set(d) - set(cls.FIELDS))
        if unknown:
            raise ConfigurationError("unknown clr keys: %s" % ', '.join(unknown))
        missing = [key for key in cls.FIELDS if key not in d]
        if missing:
            raise ConfigurationError("clr is missing %s" % ', '.join(missing))
        return cls(**d)


def clr_rate(iteration, sched):
    """
    Learning rate at `iteration` (counted from 0).

    >>> sched = ClrSchedule(0.001, 0.005, 5500)
    >>> [round(clr_rate(i, sched), 12) for i in (0, 2750, 5500, 11000)]
    [0.001, 0.003, 0.005, 0.001]
    """
    assert isinstance(sched, ClrSchedule)
    if iteration < 0:
        raise ValueError("iteration must be non-negative")
    cycle = math.floor(1 + iteration / (2.0 * sched.step_size))
    x = abs(iteration / float(sched.step_size) - 2 * cycle + 1)
    return sched.base_lr + (sched.max_lr - sched.base_lr) * max(0.0, 1.0 - x)


def sgd_step(params, grads, lr, iteration=None):
    """
    One descent step: every parameter p becomes p - lr * g.  Returns new
    arrays (or a new Mlp); the inputs are left untouched.

    :param params: an Mlp, or a list of parameter arrays
    :param grads: for an Mlp, the (dW, db) pairs from mlp_backward; else a
                  list of gradient arrays shape-matched to params
    :param iteration: training iteration, reported if a gradient is not finite
    """
    if isinstance(params, Mlp):
        flat = []
        for dW, db in grads:
            flat.append(dW)
            flat.append(db)
        new = sgd_step(params.parameters(), flat, lr, iteration)
        return Mlp(params.layers, new[0::2], new[1::2])
    if len(params) != len(grads):
        raise ShapeError("%i parameters but %i gradients" % (len(params), len(grads)))
    updated = []
    for p, g in zip(params, grads):
        g = np.asarray(g, dtype=np.float64)
        if g.shape != np.shape(p):
            raise ShapeError("gradient of shape %r for parameter of shape %r" % (g.shape, np.shape(p)))
        if not np.all(np.isfinite(g)):
            raise TrainingError("non-finite gradient", iteration=iteration, lr=lr)
        updated.append(p - lr * g)
    return updated

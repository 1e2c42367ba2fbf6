## -*- python -*-

"""
Base classes for the dense network engine: the exception hierarchy
shared by the whole package, and the registry that maps activation
names to the classes that evaluate them.
"""

import sys
import logging

logger = logging.getLogger("ltae.nn")


class LtaeError(Exception):
    pass

class ShapeError(LtaeError):
    """Exception that is raised when array dimensions do not agree."""

class DegenerateBatchError(LtaeError):
    """Exception that is raised when a batch is too small to normalize."""

class NonInvertibleError(LtaeError):
    """Exception that is raised when inverting a latent transform with a
    (near) zero scale entry."""

class ConfigurationError(LtaeError):
    """Exception that is raised when a model or preset configuration is
    invalid."""

class EmptySetError(LtaeError):
    """Exception that is raised when a set operand has no elements."""

class UnfittedError(LtaeError):
    """Exception that is raised when sampling from a bundle whose sampling
    statistics have not been fitted."""

class VariantError(LtaeError):
    """Exception that is raised when an operation is not defined for the
    model variant it was given."""

class ActivationLookupError(LtaeError):
    """Exception that is raised when lookup of an activation handler fails"""


class TrainingError(LtaeError):
    """Exception that is raised when training produces a non-finite value."""

    def __init__(self, message, iteration=None, lr=None):
        super(TrainingError, self).__init__(message)
        self.iteration = iteration
        self.lr = lr

    def __str__(self):
        msg = super(TrainingError, self).__str__()
        if self.iteration is None:
            return msg
        return "%s (iteration %i, lr %r)" % (msg, self.iteration, self.lr)


class FormatError(LtaeError):
    """Exception that is raised when a binary file does not have the
    expected layout."""

    def __init__(self, message, offset=None):
        super(FormatError, self).__init__(message)
        self.offset = offset

    def __str__(self):
        msg = super(FormatError, self).__str__()
        if self.offset is None:
            return msg
        return "%s at byte offset %i" % (msg, self.offset)


class LtaeWarning(UserWarning):
    pass

class ConfigWarning(LtaeWarning):
    """
    Warning for configuration fields that the selected model variant
    ignores.
    """


class ActivationMatcher(object):
    """
    Activation matcher object: maps activation names to classes that
    handle those activations.
    """

    def __init__(self):
        """Constructor"""
        self._activations = {}

    def register(self, name, handler):
        """Register a new handler class for a given activation name

        :param name: activation name, e.g. 'softplus'

        :param handler: class to handle this activation
        """
        name = name.strip().lower()
        if name in self._activations:
            raise ValueError("activation %s already registered" % (name,))
        self._activations[name] = handler

    def lookup(self, name):
        """
        lookup(name) -> handler class

        :param name: activation name
        :returns: the handler class registered for the name, or raises
                  ActivationLookupError.
        """
        logger.debug("ActivationMatcher.lookup(%r)", name)
        try:
            rv = self._activations[name.strip().lower()]
        except (KeyError, AttributeError):
            logger.debug("try to lookup activation handler for %r => failure", name)
            raise ActivationLookupError(name)
        logger.debug("try to lookup activation handler for %r => success (%r)", name, rv)
        return rv

    def names(self):
        return sorted(self._activations)


activation_matcher = ActivationMatcher()


class ActivationMeta(type):
    "Metaclass for automatically registering activation handlers"
    def __init__(mcs, name, bases, dict_):
        "metaclass __init__"
        type.__init__(mcs, name, bases, dict_)
        if __debug__:
            try:
                iter(mcs.NAMES)
            except (TypeError, AttributeError):
                sys.stderr.write("ERROR: missing NAMES on class %s.%s\n" % (mcs.__module__, mcs.__name__))
        for activation_name in mcs.NAMES:
            activation_matcher.register(activation_name, mcs)


class Activation(object, metaclass=ActivationMeta):
    '''Abstract base class for all classes dedicated to evaluating one
    elementwise activation function and its derivative.'''

    ## list of activation names it handles
    NAMES = []

    ## Lipschitz constant of the function; every registered activation is
    ## at most 1-Lipschitz
    LIPSCHITZ = 1.0

    @classmethod
    def new(cls, name):
        """
        >>> Activation.new('sigmoid').name
        'sigmoid'
        """
        if isinstance(name, Activation):
            return name
        handler_class = activation_matcher.lookup(name)
        return handler_class(name.strip().lower())

    def __init__(self, name):
        if type(self) is Activation:
            raise TypeError('Activation is an abstract class; use Activation.new(...)')
        self.name = name

    def __repr__(self):
        return "<ltae.Activation %r>" % (self.name,)

    def __eq__(self, other):
        return isinstance(other, Activation) and other.name == self.name

    def __hash__(self):
        return hash(self.name)

    def forward(self, a):
        '''Evaluate the activation elementwise at pre-activation values `a`.'''
        raise NotImplementedError

    def grad(self, a):
        '''Evaluate the elementwise derivative at pre-activation values `a`.'''
        raise NotImplementedError

Activation.NAMES = NotImplemented

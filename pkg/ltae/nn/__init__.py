# importing the activations module registers its handlers
from . import activations
from .base import Activation, activation_matcher
from .activations import activate, activate_grad
from .rng import Rng, gaussian, uniform
from .mlp import LayerSpec, Mlp, layer_specs, linear_forward, mlp_forward, mlp_backward, \
     xavier_init, spectral_norm, lipschitz_bound
from .optim import ClrSchedule, clr_rate, sgd_step

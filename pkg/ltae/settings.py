# pylint: disable-msg=W0105

"""

Global settings for model training, evaluation and the presets.

"""

import os


noise_site = 'pre_transform'
"""
Where latent noise is injected in LTAE/DLTAE training.  With
'pre_transform' the noise is added to the encoder output and both the
transformation and the latent networks consume the noisy vector.  With
'post_transform' the noise is added to the output of the latent
network, just before the decoder.
"""

guard_epsilon = 1e-8
"""
A latent dimension whose batch standard deviation (or range, for the
min-max normalization) is below this value normalizes to all zeros.
"""

invert_epsilon = 1e-12
"""
Smallest absolute scale entry for which a latent transform is
considered invertible.
"""

clamp_delta = 1e-7
"""
Probabilities are clamped to [clamp_delta, 1 - clamp_delta] before
taking logarithms, in the reconstruction loss and in the cross-entropy
ground distance.
"""

hausdorff_block_size = 256
"""
Rows and columns per block when materializing distance matrices between
image sets.
"""

bulk_rng_threshold = 4096
"""
Requests for at least this many 64-bit words are served by parallel
copies of the generator stream instead of stepping it one word at a
time.  The words produced are the same either way.
"""

log_every = 1000
"""
Training logs its progress at INFO level every `log_every` iterations.
"""

data_dir = os.environ.get('LTAE_DATA_DIR') or None
"""
Default directory holding the MNIST IDX files, from the LTAE_DATA_DIR
environment variable.
"""


error_handler = None
"""
Custom error handling.
Error handler, or None.  When it is None, training errors raised while
running a preset propagate to the caller.  Else it can be a
:class:`ltae.settings.ErrorHandler` subclass instance that handles the error.
"""


class ErrorHandler(object):
    def handle_error(self, model_name, exception, traceback_):
        """
        Handles a model training error inside a preset.  Should return
        True to tell the preset to record the model as failed and move on
        to the next model.  Returning False will cause the exception to
        propagate, thus aborting the preset.
        """
        raise NotImplementedError

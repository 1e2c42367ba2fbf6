from ltae.nn.base import LtaeError, ShapeError, DegenerateBatchError, NonInvertibleError, \
     TrainingError, ConfigurationError, FormatError, EmptySetError, UnfittedError, \
     VariantError, ActivationLookupError, LtaeWarning, ConfigWarning
from ltae.nn import Rng, ClrSchedule
from ltae.latent import LatentBatch, LatentTransform, NoiseSpec
from ltae.metrics import ImageSet, GroundMetric, hausdorff, diameter, replicate_report
from ltae.models import ModelConfig, ModelBundle, SamplingStats, CorruptionSpec, build_model, \
     train, generate, denoise, reconstruct, interpolate
from ltae.checkpoint import save_bundle, load_bundle
from ltae.idx import read_idx_images, read_idx_labels
try:
    from ltae.version import version as __version__
except ImportError: # the version.py file is generated and may not exist
    pass

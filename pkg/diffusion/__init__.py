from ._schedule import *
from ._conditioning import *
from ._model import *
from ._sampling import *
from ._checkpoint import *

__all__ = ['NoiseSchedule',
           'make_schedule',
           'StepRangeError',
           'DEFAULT_STEPS',
           'DEFAULT_BETA_START',
           'DEFAULT_BETA_END',
           'forward_sample',
           'corrupt_step',
           'posterior_mean',
           'true_posterior_mean',
           'analytic_gaussian_denoiser',
           'diffusion_loss',
           'Conditioning',
           'LAYOUTS',
           'FULL',
           'CONTENT_SPEAKER',
           'CONTENT_EMOTION_ONEHOT',
           'conditioning_blocks',
           'speaker_onehot',
           'upsample_embedding',
           'assemble_conditioning',
           'DecoderConfig',
           'DECODER_PRESETS',
           'decoder_preset',
           'DenoiserModel',
           'step_embedding',
           'denoiser_forward',
           'ancestral_sample',
           'reverse_sample',
           'Checkpoint',
           'save_checkpoint',
           'load_checkpoint',
           'sidecar_path',
           'CHECKPOINT_FORMAT_VERSION']

from ._config import *
from ._data import *
from ._train import *
from ._convert import *
from ._evaluate import *

__all__ = ['TrainConfig',
           'ConversionRequest',
           'EMOTION_SOURCES',
           'TrainingSet',
           'step_generator',
           'train',
           'make_optimizer',
           'read_training_log',
           'TRAIN_LOG',
           'FINAL_CHECKPOINT',
           'CHECKPOINT_DIR',
           'resolve_utterance',
           'convert_waveforms',
           'convert',
           'EvaluationConfig',
           'plan_trials',
           'evaluate',
           'self_reconstruction_mcd']

from ._pitch import *
from ._cepstrum import *
from ._dtw import *
from ._metrics import *
from ._verification import *
from ._report import *

__all__ = ['F0Track',
           'extract_f0',
           'frame_signal',
           'ANALYSIS_HOP',
           'ANALYSIS_WINDOW',
           'CepstraMatrix',
           'mel_cepstrum',
           'CEPSTRAL_ORDER',
           'Alignment',
           'dtw_align',
           'frame_costs',
           'mcd',
           'mcd_from_cepstra',
           'MCD_CONSTANT',
           'vde',
           'ffe',
           'f0_rmse',
           'eer_threshold',
           'SpeakerVerifier',
           'sv_accuracy',
           'EvalReport',
           'ablation_table',
           'report_summary_json',
           'CONDITIONS']

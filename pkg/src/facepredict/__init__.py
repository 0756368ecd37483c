"""Face aging prediction from image time series: STFT + PCA features, MLP forecasting."""

from .config import PipelineConfig
from .dataset import Corpus, FaceRecord, RawImage, SubjectSequence, load_pgm, parse_record_name, scan_corpus, write_pgm
from .evalmatch import EvalReport, MatchScore, evaluate_corpus, evaluate_subject, match_score
from .features import PcaBasis, fit_pca, project, reconstruct
from .imageproc import NormParams, denormalize, normalize, resize_bilinear
from .pipeline import FittedPipeline, fit_pipeline, predict_images
from .predictor import (
    LayerSpec,
    MlpModel,
    TrainConfig,
    TrainReport,
    build_training_pairs,
    mlp_backprop,
    mlp_forward,
    mlp_init,
    mlp_train,
    predict_next,
)
from .spectral import StftConfig, grid_to_vector, hann_window, stft_forward, stft_inverse, vector_to_grid

__version__ = "0.1.0"

"""Convolutional move-predictor engine with hand-written backpropagation."""

from othellonet.nn.checkpoint import Checkpoint, load_model, save_model
from othellonet.nn.errors import (
    BadMagic,
    ChecksumMismatch,
    ModelError,
    ShapeMismatch,
    TruncatedCheckpoint,
    VersionMismatch,
)
from othellonet.nn.layers import (
    BatchNorm,
    Conv2D,
    Dropout,
    Flatten,
    ForwardContext,
    FullyConnected,
    Layer,
    ReLU,
    Softmax,
)
from othellonet.nn.network import (
    ARCHITECTURES,
    NetworkSpec,
    Parameters,
    Trace,
    backward,
    forward,
    he_init,
    l2_penalty,
    loss,
    predict,
    preset,
)
from othellonet.nn.optim import OptimizerState, TrainConfig, lr_at, sgd_step
from othellonet.nn.trainer import (
    EpochRecord,
    Examples,
    TrainingLog,
    evaluate_topk,
    to_examples,
    topk_hits,
    train,
    train_bagged,
)

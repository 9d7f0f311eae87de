"""From-scratch differentiable building blocks in float64.

Scaled dot-product multi-head self-attention, average pooling, a
bidirectional LSTM encoder, additive multimodal fusion, prediction heads,
the multi-task loss, reverse-mode gradients, and Adam — all verified
against central finite differences.
"""

from .tensor import Tensor, backward, constant
from .layers import MhsaLayer, attention, average_pool, layer_norm, mhsa_forward
from .recurrent import SequenceEncoderState, bilstm_forward
from .fusion import FusionLayer, PredictionHeads, fuse
from .losses import multitask_loss
from .adam import AdamState, adam_step
from .model import FusionNetwork, ModelConfig
from .checkpoint import load_checkpoint, save_checkpoint

__all__ = [
    "Tensor",
    "backward",
    "constant",
    "MhsaLayer",
    "attention",
    "average_pool",
    "layer_norm",
    "mhsa_forward",
    "SequenceEncoderState",
    "bilstm_forward",
    "FusionLayer",
    "PredictionHeads",
    "fuse",
    "multitask_loss",
    "AdamState",
    "adam_step",
    "FusionNetwork",
    "ModelConfig",
    "load_checkpoint",
    "save_checkpoint",
]

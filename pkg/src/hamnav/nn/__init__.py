"""Dichtes float64-Tensorsubstrat mit Rückwärtsdifferentiation."""

from .checkpoint import load_checkpoint, save_checkpoint
from .layers import MLP, Linear, LayerNorm, MultiHeadAttention, TransformerBlock, attention_forward, layer_norm, linear_forward
from .params import Adam, Parameter, ParamStore
from .tensor import Tensor, grad, no_grad

__all__ = [
    "Adam",
    "LayerNorm",
    "Linear",
    "MLP",
    "MultiHeadAttention",
    "ParamStore",
    "Parameter",
    "Tensor",
    "TransformerBlock",
    "attention_forward",
    "grad",
    "layer_norm",
    "linear_forward",
    "load_checkpoint",
    "no_grad",
    "save_checkpoint",
]

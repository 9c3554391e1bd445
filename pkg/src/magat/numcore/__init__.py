"""Dense numeric kernel: tensors, layers, losses, optimizer, gradient checks."""

from .checkpoint import load_checkpoint, save_checkpoint
from .gradcheck import grad_check
from .layers import (BatchNorm2d, CondBatchNorm2d, Conv2d, ConvTranspose2d,
                     Linear, Module, make_norm)
from .losses import bce_loss, mse_loss
from .norm import CbnParams, RunningStats, batch_norm, cond_batch_norm
from .ops import (apply_activation, conv2d, conv_transpose2d, dropout, elu,
                  global_avg_pool, leaky_relu, sigmoid)
from .params import ParamSet, sgd_step
from .tensor import Tensor, concat, stack, take_rows, where

__all__ = [
    "Tensor", "concat", "stack", "take_rows", "where",
    "apply_activation", "elu", "leaky_relu", "sigmoid", "dropout",
    "conv2d", "conv_transpose2d", "global_avg_pool",
    "batch_norm", "cond_batch_norm", "CbnParams", "RunningStats",
    "bce_loss", "mse_loss",
    "ParamSet", "sgd_step", "grad_check",
    "save_checkpoint", "load_checkpoint",
    "Module", "Linear", "Conv2d", "ConvTranspose2d",
    "BatchNorm2d", "CondBatchNorm2d", "make_norm",
]

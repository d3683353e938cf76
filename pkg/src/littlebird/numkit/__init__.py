"""Minimal dense numeric core with analytic backward passes."""

from littlebird.numkit import ops
from littlebird.numkit.gradcheck import grad_check
from littlebird.numkit.layers import FeedForward, LayerNorm, LinearMap
from littlebird.numkit.memory import AllocationTracker, track_allocations
from littlebird.numkit.ops import layer_norm, masked_softmax, matmul
from littlebird.numkit.params import ParamStore
from littlebird.numkit.tensor import Tensor, as_tensor, default_dtype, use_precision

__all__ = [
    "AllocationTracker",
    "FeedForward",
    "LayerNorm",
    "LinearMap",
    "ParamStore",
    "Tensor",
    "as_tensor",
    "default_dtype",
    "grad_check",
    "layer_norm",
    "masked_softmax",
    "matmul",
    "ops",
    "track_allocations",
    "use_precision",
]

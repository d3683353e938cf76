"""Central-difference gradient checking."""

from __future__ import annotations

from collections.abc import Callable

import numpy as np

from littlebird.exceptions import DimensionError, NumericError
from littlebird.logging import get_logger
from littlebird.numkit.params import ParamStore
from littlebird.numkit.tensor import Tensor

logger = get_logger(__name__)


def grad_check(
    f: Callable[[], Tensor],
    params: ParamStore,
    eps: float = 1e-4,
    scale_floor: float = 1e-3,
    max_entries: int | None = None,
    rng: np.random.Generator | None = None,
) -> float:
    """
    Compare analytic gradients to central differences.

    The numeric estimate for each entry is (f(θ+eps) − f(θ−eps)) / 2eps and the
    relative error is |analytic − numeric| / max(|analytic|, |numeric|, scale_floor).

    Args:
        f: Deterministic scalar-valued computation over `params`.
        params: Parameters to probe.
        eps: Finite-difference step.
        scale_floor: Lower bound of the relative-error denominator.
        max_entries: Probe at most this many entries per parameter (random subset).
        rng: Generator for the subset; required with `max_entries`.

    Returns:
        The worst relative error over all probed entries.

    Raises:
        NumericError: If f is not finite at a probe point.
    """
    params.zero_grad()
    loss = f()
    if loss.size != 1:
        raise DimensionError(f"grad_check needs a scalar function, got shape {loss.shape}")
    _require_finite(loss.item())
    loss.backward()

    worst = 0.0
    worst_name = ""
    for name, tensor in params.items():
        analytic = tensor.grad if tensor.grad is not None else np.zeros_like(tensor.data)
        indices = np.arange(tensor.size)
        if max_entries is not None and tensor.size > max_entries:
            generator = rng if rng is not None else np.random.default_rng(0)
            indices = np.sort(generator.choice(tensor.size, size=max_entries, replace=False))
        for flat_index in indices:
            original = float(tensor.data.flat[flat_index])
            tensor.data.flat[flat_index] = original + eps
            plus = _require_finite(f().item())
            tensor.data.flat[flat_index] = original - eps
            minus = _require_finite(f().item())
            tensor.data.flat[flat_index] = original
            numeric = (plus - minus) / (2 * eps)
            exact = float(analytic.flat[flat_index])
            error = abs(exact - numeric) / max(abs(exact), abs(numeric), scale_floor)
            if error > worst:
                worst, worst_name = error, name

    logger.debug("grad_check_finished", worst_relative_error=worst, worst_param=worst_name)
    return worst


def _require_finite(value: float) -> float:
    if not np.isfinite(value):
        raise NumericError(f"Non-finite function value during grad check: {value}")
    return value

"""Per-head BiALiBi slopes."""

from __future__ import annotations

import numpy as np
import numpy.typing as npt

from littlebird.exceptions import DimensionError, NumericError
from littlebird.numkit import ParamStore, Tensor


def alibi_slopes(heads: int) -> npt.NDArray[np.float64]:
    """Head-geometric ALiBi sequence 2^(-8k/H) for k = 1..H."""
    k = np.arange(1, heads + 1, dtype=np.float64)
    return 2.0 ** (-8.0 * k / heads)


class BiasSlopes:
    """
    Head-specific (alpha, beta, gamma) for one layer.

    alpha is the bias for interactions with position 0 ([CLS]); beta and gamma
    scale distances to keys on the left and right. Values are unconstrained
    reals.
    """

    def __init__(self, alpha: Tensor, beta: Tensor, gamma: Tensor) -> None:
        shapes = {alpha.shape, beta.shape, gamma.shape}
        if len(shapes) != 1 or alpha.ndim != 1:
            raise DimensionError(
                f"Slopes must be matching vectors, got {alpha.shape}, {beta.shape}, {gamma.shape}"
            )
        for part in (alpha, beta, gamma):
            if not np.all(np.isfinite(part.data)):
                raise NumericError("Slopes must be finite")
        self.alpha = alpha
        self.beta = beta
        self.gamma = gamma

    @classmethod
    def create(cls, store: ParamStore, name: str, heads: int) -> BiasSlopes:
        """Trainable slopes: alpha = 0, beta = gamma = ALiBi geometric sequence."""
        geometric = alibi_slopes(heads)
        return cls(
            store.register(f"{name}.alpha", Tensor(np.zeros(heads))),
            store.register(f"{name}.beta", Tensor(geometric.copy())),
            store.register(f"{name}.gamma", Tensor(geometric.copy())),
        )

    @classmethod
    def fixed(
        cls,
        heads: int,
        alpha: float | npt.ArrayLike = 0.0,
        beta: float | npt.ArrayLike = 0.0,
        gamma: float | npt.ArrayLike = 0.0,
    ) -> BiasSlopes:
        """Constant slopes, broadcast to every head."""
        values = [
            np.broadcast_to(np.asarray(v, dtype=np.float64), (heads,)) for v in (alpha, beta, gamma)
        ]
        return cls(*(Tensor(v.copy()) for v in values))

    @property
    def heads(self) -> int:
        return self.alpha.shape[0]

    def copy_from(self, other: BiasSlopes) -> None:
        self.alpha.data[...] = other.alpha.data
        self.beta.data[...] = other.beta.data
        self.gamma.data[...] = other.gamma.data

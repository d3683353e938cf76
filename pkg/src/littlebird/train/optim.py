"""Optimizers over a ParamStore: AdamW and momentum SGD, fixed learning rate."""

from __future__ import annotations

import numpy as np

from littlebird.config import TrainConfig
from littlebird.exceptions import ConfigurationError
from littlebird.numkit import ParamStore
from littlebird.numkit.tensor import Array
from littlebird.protocols import OptimizerProtocol


def _decays(values: Array) -> bool:
    # matrices decay; bias, norm and slope vectors do not
    return values.ndim >= 2


class MomentumSGD:
    """Heavy-ball momentum with decoupled weight decay."""

    def __init__(
        self,
        store: ParamStore,
        learning_rate: float,
        momentum: float = 0.9,
        weight_decay: float = 0.0,
    ) -> None:
        self.store = store
        self.learning_rate = learning_rate
        self.momentum = momentum
        self.weight_decay = weight_decay
        self._velocity: dict[str, Array] = {}

    def zero_grad(self) -> None:
        self.store.zero_grad()

    def step(self) -> None:
        for name, param in self.store.items():
            if param.grad is None:
                continue
            velocity = self._velocity.setdefault(name, np.zeros_like(param.data))
            velocity *= self.momentum
            velocity += param.grad
            if self.weight_decay and _decays(param.data):
                param.data *= 1.0 - self.learning_rate * self.weight_decay
            param.data -= self.learning_rate * velocity


class AdamW:
    """Adam with bias correction and decoupled weight decay."""

    def __init__(
        self,
        store: ParamStore,
        learning_rate: float,
        beta1: float = 0.9,
        beta2: float = 0.999,
        weight_decay: float = 0.01,
        eps: float = 1e-8,
    ) -> None:
        self.store = store
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.weight_decay = weight_decay
        self.eps = eps
        self.steps = 0
        self._first: dict[str, Array] = {}
        self._second: dict[str, Array] = {}

    def zero_grad(self) -> None:
        self.store.zero_grad()

    def step(self) -> None:
        self.steps += 1
        correction1 = 1.0 - self.beta1**self.steps
        correction2 = 1.0 - self.beta2**self.steps
        for name, param in self.store.items():
            if param.grad is None:
                continue
            m = self._first.setdefault(name, np.zeros_like(param.data))
            v = self._second.setdefault(name, np.zeros_like(param.data))
            m *= self.beta1
            m += (1.0 - self.beta1) * param.grad
            v *= self.beta2
            v += (1.0 - self.beta2) * param.grad**2
            if self.weight_decay and _decays(param.data):
                param.data *= 1.0 - self.learning_rate * self.weight_decay
            param.data -= self.learning_rate * (m / correction1) / (
                np.sqrt(v / correction2) + self.eps
            )


Optimizer = OptimizerProtocol


def build_optimizer(
    store: ParamStore, config: TrainConfig, learning_rate: float | None = None
) -> Optimizer:
    """Optimizer named by `config.optimizer`."""
    lr = learning_rate if learning_rate is not None else config.learning_rate
    if config.optimizer == "adamw":
        return AdamW(store, lr, config.momentum, config.beta2, config.weight_decay)
    if config.optimizer == "momentum":
        return MomentumSGD(store, lr, config.momentum, config.weight_decay)
    raise ConfigurationError(f"Unknown optimizer {config.optimizer!r}")

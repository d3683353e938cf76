"""Named registry of trainable tensors."""

from __future__ import annotations

from collections.abc import Iterator, Mapping

import numpy as np

from littlebird.exceptions import ConfigurationError, DimensionError
from littlebird.numkit.tensor import Array, Tensor


class ParamStore:
    """
    Ordered registry of trainable tensors.

    Names are unique and iteration follows registration order, so a model
    built from the same config and seed always lists its parameters in the
    same order.
    """

    def __init__(self) -> None:
        self._params: dict[str, Tensor] = {}

    def register(self, name: str, tensor: Tensor) -> Tensor:
        """Mark `tensor` trainable under `name` and return it."""
        if name in self._params:
            raise ConfigurationError(f"Duplicate parameter name: {name}", name=name)
        tensor.requires_grad = True
        tensor.name = name
        self._params[name] = tensor
        return tensor

    def __getitem__(self, name: str) -> Tensor:
        return self._params[name]

    def __contains__(self, name: object) -> bool:
        return name in self._params

    def __iter__(self) -> Iterator[str]:
        return iter(self._params)

    def __len__(self) -> int:
        return len(self._params)

    def items(self) -> Iterator[tuple[str, Tensor]]:
        return iter(self._params.items())

    def num_elements(self) -> int:
        return sum(t.size for t in self._params.values())

    def zero_grad(self) -> None:
        for tensor in self._params.values():
            tensor.zero_grad()

    def arrays(self) -> dict[str, Array]:
        """Copies of every parameter, keyed by name."""
        return {name: t.data.copy() for name, t in self._params.items()}

    def load_arrays(self, arrays: Mapping[str, Array], strict: bool = True) -> None:
        """
        Overwrite parameter values in place.

        Args:
            arrays: Values keyed by parameter name.
            strict: Require exactly the registered names.

        Raises:
            ConfigurationError: On missing or unexpected names (strict mode).
            DimensionError: On shape mismatch.
        """
        if strict:
            missing = sorted(set(self._params) - set(arrays))
            unexpected = sorted(set(arrays) - set(self._params))
            if missing or unexpected:
                raise ConfigurationError(
                    "Parameter names do not match",
                    missing=missing[:5],
                    unexpected=unexpected[:5],
                )
        for name, value in arrays.items():
            if name not in self._params:
                continue
            self.assign(name, value)

    def assign(self, name: str, value: Array) -> None:
        target = self._params[name]
        if target.data.shape != np.shape(value):
            raise DimensionError(
                f"Cannot assign shape {np.shape(value)} to {name} of shape {target.shape}",
                name=name,
            )
        target.data[...] = value

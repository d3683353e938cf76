"""Protocol definitions shared across packages."""

from typing import Protocol, runtime_checkable


@runtime_checkable
class OptimizerProtocol(Protocol):
    """Parameter update rule over a ParamStore."""

    def step(self) -> None:
        """Apply one update from the accumulated gradients."""
        ...

    def zero_grad(self) -> None:
        """Clear accumulated gradients."""
        ...

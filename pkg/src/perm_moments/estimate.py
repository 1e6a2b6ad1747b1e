"""Monte Carlo estimate record shared by the sampling drivers."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class MCEstimate:
    """Mean of a complex-valued Monte Carlo sample with its standard error.

    ``stderr`` is the standard error of the mean in the combined sense
    sqrt(E|V - mean|^2 / trials), so |estimate - truth| <= 3 * stderr is the
    usual acceptance band.  ``tail_bound`` reports any certified truncation
    error on top of sampling noise (None when not applicable).
    """

    value: complex
    stderr: float
    trials: int
    seed: int
    sequence_length: int | None = None
    tail_bound: float | None = None

    def to_record(self) -> dict:
        return {
            "value_re": self.value.real,
            "value_im": self.value.imag,
            "stderr": self.stderr,
            "trials": self.trials,
            "seed": self.seed,
            "L": self.sequence_length,
            "tail_bound": self.tail_bound,
        }

"""Core parameter and frame types shared by every solver."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum


class Frame(Enum):
    ORIGINAL = "original"
    FULL_POLARON = "full_polaron"
    VARIATIONAL = "variational"


@dataclass(frozen=True)
class ModelParams:
    """Two-level system: splitting epsilon, tunneling delta, inverse temperature beta."""

    epsilon: float
    delta: float
    beta: float

    def __post_init__(self):
        if not math.isfinite(self.epsilon):
            raise ValueError("epsilon must be finite")
        if not (self.delta >= 0.0):
            raise ValueError("delta must be >= 0")
        if not (self.beta > 0.0):
            raise ValueError("beta must be > 0")


@dataclass(frozen=True)
class BathParams:
    """Super-ohmic bath: coupling strength gamma, exponential cut-off omega_c."""

    gamma: float
    omega_c: float

    def __post_init__(self):
        if not (self.gamma >= 0.0):
            raise ValueError("gamma must be >= 0")
        if not (self.omega_c > 0.0):
            raise ValueError("omega_c must be > 0")


@dataclass(frozen=True)
class FrameSolution:
    """A fixed choice of displacement profile: renormalization B, Delta_R = B*delta,
    the scalar energy shift of the transformed system Hamiltonian, and eta."""

    frame: Frame
    B: float
    delta_r: float
    shift: float
    eta: float

    def __post_init__(self):
        if not (-1e-12 <= self.B <= 1.0 + 1e-12):
            raise ValueError(f"B out of [0, 1]: {self.B}")
        if self.frame is Frame.ORIGINAL:
            if self.B != 1.0 or self.shift != 0.0:
                raise ValueError("original frame requires B = 1, shift = 0")

    @staticmethod
    def build(frame: Frame, B: float, shift: float, model: ModelParams) -> "FrameSolution":
        delta_r = B * model.delta
        eta = math.hypot(model.epsilon, delta_r)
        return FrameSolution(frame=frame, B=B, delta_r=delta_r, shift=shift, eta=eta)


def original_frame(model: ModelParams) -> FrameSolution:
    return FrameSolution.build(Frame.ORIGINAL, 1.0, 0.0, model)

"""Catastrophe chain models: transition probabilities, rates and phase diagram."""

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from rich.console import Console

from app.errors import DomainError, InvalidSpecError, MissingRateLayerError

console = Console(stderr=True)


class ModelKind(str, enum.Enum):
    """Which disaster mechanism drives the chain."""
    MODEL_A = "A"
    MODEL_B = "B"


class Recurrence(str, enum.Enum):
    """Recurrence class of the chain."""
    TRANSIENT = "Transient"
    NULL_RECURRENT = "NullRecurrent"
    POSITIVE_RECURRENT = "PositiveRecurrent"


@dataclass(frozen=True)
class RateLayer:
    """Jump rates r_x = r0 * (x + 1) ** lam of the continuous-time chain."""
    lam: float
    r0: float = 1.0


@dataclass(frozen=True)
class ModelSpec:
    """Parameters of a catastrophe chain.

    Model A grows with probability 1 - alpha / (nu + x**beta), Model B with
    probability (1 + x**-beta) ** -alpha. At the origin the growth probability
    is ``p0`` for both.
    """
    kind: ModelKind
    alpha: float
    beta: float = 1.0
    nu: Optional[float] = None
    p0: float = 1.0
    ct: Optional[RateLayer] = None

    def __post_init__(self):
        kind = ModelKind(self.kind)
        object.__setattr__(self, "kind", kind)

        if not self.alpha > 0:
            raise InvalidSpecError("alpha>0", f"alpha must be positive, got {self.alpha}")
        if not 0 < self.p0 <= 1:
            raise InvalidSpecError("p0 in (0,1]", f"p0 must lie in (0, 1], got {self.p0}")

        if kind is ModelKind.MODEL_A:
            if self.nu is None:
                raise InvalidSpecError("nu>-1", "Model A needs nu")
            if not self.nu > -1:
                raise InvalidSpecError("nu>-1", f"nu must exceed -1, got {self.nu}")
            if not self.beta >= 0:
                raise InvalidSpecError("beta>=0", f"Model A needs beta >= 0, got {self.beta}")
            if self.alpha > self.nu + 1:
                raise InvalidSpecError(
                    "alpha<nu+1", f"Model A needs alpha <= nu + 1, got alpha={self.alpha}, nu={self.nu}"
                )
        else:
            if self.nu is not None:
                raise InvalidSpecError("nu unset for Model B", "Model B takes no nu parameter")
            if not self.beta > 0:
                raise InvalidSpecError("beta>0", f"Model B needs beta > 0, got {self.beta}")

        if self.ct is not None and not self.ct.r0 > 0:
            raise InvalidSpecError("r0>0", f"rate scale r0 must be positive, got {self.ct.r0}")

    @property
    def q0(self) -> float:
        return 1.0 - self.p0

    @property
    def confined_to(self) -> Optional[int]:
        """Highest reachable state when some disaster probability equals one."""
        if self.kind is ModelKind.MODEL_A and self.alpha == self.nu + 1:
            return 1
        return None

    def with_rates(self, lam: float, r0: float = 1.0) -> "ModelSpec":
        return ModelSpec(self.kind, self.alpha, self.beta, self.nu, self.p0, RateLayer(lam, r0))

    def describe(self) -> dict:
        """Plain mapping used in reports and persisted records."""
        out = {"model": self.kind.value, "alpha": self.alpha, "beta": self.beta, "p0": self.p0}
        if self.nu is not None:
            out["nu"] = self.nu
        if self.ct is not None:
            out["lambda"] = self.ct.lam
            out["r0"] = self.ct.r0
        return out


@dataclass(frozen=True)
class ChainClassification:
    """Phase-diagram verdict for a spec."""
    recurrence: Recurrence
    ct_explosive: Optional[bool] = None
    confined_to: Optional[int] = None


def _log_growth_positive(spec: ModelSpec, x: np.ndarray) -> np.ndarray:
    """log p_x for real x >= 1, using exp(beta * log x) for x**beta."""
    if spec.kind is ModelKind.MODEL_A:
        power = np.exp(spec.beta * np.log(x))
        with np.errstate(divide="ignore"):
            return np.log1p(-spec.alpha / (spec.nu + power))
    return -spec.alpha * np.log1p(np.exp(-spec.beta * np.log(x)))


def log_growth_probs(spec: ModelSpec, x) -> np.ndarray:
    """Vectorised log p_x; state 0 maps to log p0."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    at_origin = x == 0
    out[at_origin] = math.log(spec.p0)
    if np.any(~at_origin):
        if np.any(x[~at_origin] < 1):
            raise DomainError("states must be 0 or at least 1")
        out[~at_origin] = _log_growth_positive(spec, x[~at_origin])
    return out


def growth_probs(spec: ModelSpec, xmax: int) -> np.ndarray:
    """Table of p_x for x = 0..xmax."""
    return np.exp(log_growth_probs(spec, np.arange(xmax + 1)))


def disaster_probs(spec: ModelSpec, xmax: int) -> np.ndarray:
    """Table of q_x for x = 0..xmax, computed as -expm1(log p_x)."""
    return -np.expm1(log_growth_probs(spec, np.arange(xmax + 1)))


def log_survival(spec: ModelSpec, xmax: int) -> np.ndarray:
    """log of prod_{y<x} p_y for x = 0..xmax (first entry is 0)."""
    out = np.zeros(xmax + 1)
    if xmax > 0:
        out[1:] = np.cumsum(log_growth_probs(spec, np.arange(xmax)))
    return out


def growth_prob(spec: ModelSpec, x: int) -> float:
    """Probability of moving from x to x + 1."""
    if x < 0:
        raise DomainError(f"state must be nonnegative, got {x}")
    if x == 0:
        return spec.p0
    return float(np.exp(_log_growth_positive(spec, np.array([float(x)]))[0]))


def disaster_prob(spec: ModelSpec, x: int) -> float:
    """Probability of collapsing from x to 0."""
    if x < 0:
        raise DomainError(f"state must be nonnegative, got {x}")
    if x == 0:
        return spec.q0
    return float(-np.expm1(_log_growth_positive(spec, np.array([float(x)]))[0]))


def jump_rate(spec: ModelSpec, x: int) -> float:
    """Holding rate r0 * (x + 1) ** lam of state x."""
    if spec.ct is None:
        raise MissingRateLayerError("spec has no continuous-time rate layer")
    return spec.ct.r0 * float(x + 1) ** spec.ct.lam


def jump_rates(spec: ModelSpec, xmax: int) -> np.ndarray:
    if spec.ct is None:
        raise MissingRateLayerError("spec has no continuous-time rate layer")
    return spec.ct.r0 * np.arange(1, xmax + 2, dtype=float) ** spec.ct.lam


def drift_and_variance(spec: ModelSpec, x: int) -> tuple[float, float]:
    """Local drift f(x) = p_x - x q_x and second moment p_x + x**2 q_x."""
    if x < 1:
        raise DomainError("drift is defined for x >= 1")
    p = growth_prob(spec, x)
    q = disaster_prob(spec, x)
    return p - x * q, p + x * x * q


def drift_ratio(spec: ModelSpec, x: int) -> float:
    """f(x) / sigma^2(x), the local drift-to-variance ratio."""
    drift, variance = drift_and_variance(spec, x)
    return drift / variance


def recurrence_of(spec: ModelSpec, continuous: bool = False) -> Recurrence:
    """Phase-diagram class of the jump chain, or of the CT chain when ``continuous``."""
    if spec.beta > 1:
        return Recurrence.TRANSIENT
    if spec.beta < 1:
        return Recurrence.POSITIVE_RECURRENT
    threshold = spec.alpha
    if continuous:
        if spec.ct is None:
            raise MissingRateLayerError("spec has no continuous-time rate layer")
        threshold += spec.ct.lam
    return Recurrence.POSITIVE_RECURRENT if threshold > 1 else Recurrence.NULL_RECURRENT


def classify(spec: ModelSpec) -> ChainClassification:
    """Recurrence class from the (beta, alpha, lambda) phase diagram."""
    recurrence = recurrence_of(spec, continuous=spec.ct is not None)

    explosive = None
    if spec.ct is not None:
        explosive = spec.beta > 1 and spec.ct.lam > 1

    if spec.confined_to is not None:
        console.print(
            f"[yellow]q_1 = 1 at alpha = nu + 1: the chain never leaves {{0, 1}}; "
            f"reporting the phase-diagram verdict {recurrence.value}[/yellow]"
        )
    return ChainClassification(recurrence, explosive, spec.confined_to)


def is_recurrent(spec: ModelSpec) -> bool:
    return spec.beta <= 1


def model_a(alpha: float, nu: float, beta: float = 1.0, p0: float = 1.0) -> ModelSpec:
    return ModelSpec(ModelKind.MODEL_A, alpha=alpha, beta=beta, nu=nu, p0=p0)


def model_b(alpha: float, beta: float = 1.0, p0: float = 1.0) -> ModelSpec:
    return ModelSpec(ModelKind.MODEL_B, alpha=alpha, beta=beta, p0=p0)

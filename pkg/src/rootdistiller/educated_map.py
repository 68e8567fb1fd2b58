"""The educated k-fold Newton map.

``g`` applies Newton's map ``k + 1`` times (order ``2**(k+1)`` at simple
roots) and returns ``None`` (the *Null* value) for points whose image is not
a number, leaves ``[a, b]``, or jumps farther than ``b - a``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional

from .mpcontext import MPReal, PrecContext, is_numeric
from .polynomial import EVALUATORS, Polynomial, derivative

# Null is represented as None.
MapResult = Optional[MPReal]


def order_of(k: int) -> int:
    if k < 0:
        raise ValueError("fold parameter k must be non-negative")
    return 2 ** (k + 1)


@dataclass(frozen=True)
class MapConfig:
    f: Polynomial
    a: MPReal
    b: MPReal
    k: int
    scheme: str = "compensated"
    fprime: Polynomial = field(default=None)

    def __post_init__(self):
        ctx = self.f.ctx
        if self.fprime is None:
            object.__setattr__(self, "fprime", derivative(self.f))
        object.__setattr__(self, "a", ctx.real(self.a))
        object.__setattr__(self, "b", ctx.real(self.b))
        if not self.a < self.b:
            raise ValueError(f"interval must satisfy a < b, got [{self.a}, {self.b}]")
        if self.k < 0:
            raise ValueError("fold parameter k must be non-negative")
        if self.scheme not in EVALUATORS:
            raise ValueError(f"unknown evaluation scheme {self.scheme!r}")

    @property
    def ctx(self) -> PrecContext:
        return self.f.ctx

    @property
    def order(self) -> int:
        return order_of(self.k)

    @property
    def evaluate(self) -> Callable[[Polynomial, MPReal], MPReal]:
        return EVALUATORS[self.scheme]

    def with_k(self, k: int) -> "MapConfig":
        return replace(self, k=k)


def newton_step(cfg: MapConfig, x: MPReal) -> MapResult:
    fx = cfg.evaluate(cfg.f, x)
    dfx = cfg.evaluate(cfg.fprime, x)
    if dfx == 0:
        return None
    y = x - fx / dfx
    return y if is_numeric(y) else None


def educated_g(cfg: MapConfig, x: MPReal) -> MapResult:
    x = cfg.ctx.real(x)
    y = x
    for _ in range(cfg.k + 1):
        y = newton_step(cfg, y)
        if y is None:
            return None
    if y < cfg.a or y > cfg.b:
        return None
    if abs(y - x) > cfg.b - cfg.a:
        return None
    return y

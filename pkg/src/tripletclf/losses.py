"""Margin-based surrogate losses ``l(z, t)`` for score ``z`` and label ``t``."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

KINDS = ("squared", "double_hinge", "logistic")


def _check_labels(t):
    t = np.asarray(t)
    if not np.all((t == 1) | (t == -1)):
        raise DomainError("labels must be +1 or -1")
    return t


def normalize_kind(kind: str) -> str:
    k = kind.replace("-", "_").lower()
    if k not in KINDS:
        raise DomainError(f"unknown loss {kind!r}; choose from squared, double-hinge, logistic")
    return k


def loss_value(kind: str, z, t):
    kind = normalize_kind(kind)
    m = _check_labels(t) * np.asarray(z, dtype=np.float64)
    if kind == "squared":
        out = (m - 1.0) ** 2 / 4.0
    elif kind == "double_hinge":
        out = np.maximum(-m, np.maximum(0.0, (1.0 - m) / 2.0))
    else:
        out = np.logaddexp(0.0, -m)
    return out if out.ndim else float(out)


def loss_derivative(kind: str, z, t):
    """Derivative in ``z``.

    Double hinge kinks at margins -1 and 1 take the slope of the branch
    on the smaller-margin side (-t and -t/2 respectively).
    """
    kind = normalize_kind(kind)
    t = _check_labels(t)
    m = t * np.asarray(z, dtype=np.float64)
    if kind == "squared":
        out = t * (m - 1.0) / 2.0
    elif kind == "double_hinge":
        out = np.where(m <= -1.0, -t, np.where(m <= 1.0, -t / 2.0, 0.0)) * 1.0
    else:
        # -t * sigmoid(-m), written to avoid overflow
        out = -t * np.exp(-np.logaddexp(0.0, m))
    out = np.asarray(out, dtype=np.float64)
    return out if out.ndim else float(out)


def lipschitz_and_ceiling(kind: str, c_b: float) -> tuple[float, float]:
    """Lipschitz constant and sup loss over scores ``|z| <= c_b``."""
    kind = normalize_kind(kind)
    if not c_b > 0:
        raise DomainError(f"score bound must be positive, got {c_b}")
    if kind == "squared":
        return (c_b + 1.0) / 2.0, (c_b + 1.0) ** 2 / 4.0
    if kind == "double_hinge":
        return 1.0, max(c_b, (1.0 + c_b) / 2.0)
    return 1.0, math.log1p(math.exp(c_b))


@dataclass(frozen=True)
class SurrogateLoss:
    """Bundles one loss kind; anything with ``value``/``derivative`` works
    wherever a loss is expected."""

    kind: str = "double_hinge"

    def __post_init__(self):
        object.__setattr__(self, "kind", normalize_kind(self.kind))

    def value(self, z, t):
        return loss_value(self.kind, z, t)

    def derivative(self, z, t):
        return loss_derivative(self.kind, z, t)

    def lipschitz(self, c_b: float) -> float:
        return lipschitz_and_ceiling(self.kind, c_b)[0]

    def ceiling(self, c_b: float) -> float:
        return lipschitz_and_ceiling(self.kind, c_b)[1]


def as_loss(loss) -> SurrogateLoss:
    if isinstance(loss, str):
        return SurrogateLoss(loss)
    return loss

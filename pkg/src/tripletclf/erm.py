"""Models, the unbiased triplet risk, its gradient, and Adam training."""
from __future__ import annotations

import json
import logging
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .errors import DataError, DivergenceError, DomainError
from .losses import SurrogateLoss, as_loss, normalize_kind
from .prior_model import DEFAULT_GUARD, RiskWeights, estimate_prior, risk_weights
from .rng import CounterStream
from .triplet_data import PointwiseBags

log = logging.getLogger(__name__)

MODEL_KINDS = ("linear", "mlp1")


@dataclass
class Model:
    """Scoring function ``f: R^d -> R``; the predicted label is ``sign(f)``
    with ties going to +1.

    ``shift``/``scale`` (optional) standardize inputs before scoring, so a
    model trained on standardized triplets applies to raw test features.
    """

    kind: str
    d: int
    params: np.ndarray
    hidden_width: int = 100
    shift: np.ndarray | None = None
    scale: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise DomainError(f"unknown model kind {self.kind!r}")
        self.params = np.asarray(self.params, dtype=np.float64).ravel()
        if self.params.size != n_params(self.kind, self.d, self.hidden_width):
            raise DomainError(
                f"{self.kind} model with d={self.d} needs {n_params(self.kind, self.d, self.hidden_width)} "
                f"parameters, got {self.params.size}")

    def with_params(self, params) -> "Model":
        return Model(self.kind, self.d, np.array(params, dtype=np.float64), self.hidden_width,
                     self.shift, self.scale)

    def _unpack(self, params=None):
        p = self.params if params is None else params
        d, h = self.d, self.hidden_width
        if self.kind == "linear":
            return p[:d], p[d]
        W1 = p[: d * h].reshape(h, d)
        b1 = p[d * h: d * h + h]
        w2 = p[d * h + h: d * h + 2 * h]
        return W1, b1, w2, p[-1]

    def _prepare(self, X):
        X = np.asarray(X, dtype=np.float64)
        if X.shape[-1] != self.d:
            raise DomainError(f"input dimension {X.shape[-1]} does not match model dimension {self.d}")
        if self.shift is not None:
            X = (X - self.shift) / self.scale
        return X

    def forward(self, X):
        X = self._prepare(np.atleast_2d(X))
        if self.kind == "linear":
            w, b = self._unpack()
            return X @ w + b, X
        W1, b1, w2, b2 = self._unpack()
        pre = X @ W1.T + b1
        hidden = np.maximum(pre, 0.0)
        return hidden @ w2 + b2, (X, pre, hidden)

    def backward(self, cache, dscore):
        """Gradient of ``sum(dscore * f(X))`` with respect to the parameters."""
        if self.kind == "linear":
            X = cache
            return np.concatenate([dscore @ X, [dscore.sum()]])
        X, pre, hidden = cache
        _, _, w2, _ = self._unpack()
        dpre = np.outer(dscore, w2) * (pre > 0.0)
        return np.concatenate([(dpre.T @ X).ravel(), dpre.sum(axis=0), dscore @ hidden, [dscore.sum()]])

    def score(self, X) -> np.ndarray:
        return self.forward(X)[0]

    def predict(self, X) -> np.ndarray:
        return np.where(self.score(X) >= 0.0, 1, -1)

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "d": self.d, "hidden_width": self.hidden_width,
               "params": self.params.tolist()}
        if self.shift is not None:
            out["shift"] = np.asarray(self.shift).tolist()
            out["scale"] = np.asarray(self.scale).tolist()
        return out

    @classmethod
    def from_dict(cls, obj: dict) -> "Model":
        try:
            shift = obj.get("shift")
            scale = obj.get("scale")
            return cls(obj["kind"], int(obj["d"]), np.asarray(obj["params"], dtype=np.float64),
                       int(obj.get("hidden_width", 100)),
                       None if shift is None else np.asarray(shift, dtype=np.float64),
                       None if scale is None else np.asarray(scale, dtype=np.float64))
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"malformed model object: {exc}") from None


def n_params(kind: str, d: int, hidden_width: int = 100) -> int:
    if kind == "linear":
        return d + 1
    return d * hidden_width + 2 * hidden_width + 1


def init_model(kind: str, d: int, hidden_width: int = 100, seed: int = 0) -> Model:
    """Linear models start at zero; mlp1 weights are fan-in scaled uniform
    with zero biases."""
    if kind == "linear":
        return Model(kind, d, np.zeros(d + 1), hidden_width)
    if kind != "mlp1":
        raise DomainError(f"unknown model kind {kind!r}")
    if hidden_width <= 0:
        raise DomainError("hidden_width must be positive")
    rng = CounterStream(seed).generator(1)
    h = hidden_width
    W1 = rng.uniform(-1.0, 1.0, size=(h, d)) / math.sqrt(d)
    w2 = rng.uniform(-1.0, 1.0, size=h) / math.sqrt(h)
    return Model(kind, d, np.concatenate([W1.ravel(), np.zeros(h), w2, [0.0]]), h)


def predict_score(model: Model, x):
    """Score of one vector (returns a float) or of each row of a matrix."""
    x = np.asarray(x, dtype=np.float64)
    s = model.score(x)
    return float(s[0]) if x.ndim == 1 else s


def _check_bags(bags: PointwiseBags):
    for i, bag in enumerate(bags, start=1):
        if len(bag) == 0:
            raise DataError(f"bag{i} is empty; the risk estimator needs all three bags")


def _bag_terms(model, bags, weights, loss):
    """Per-bag scores, caches and class-wise mean losses."""
    W = weights.as_array()
    out = []
    for i, bag in enumerate(bags):
        z, cache = model.forward(bag)
        lp = np.asarray(loss.value(z, 1), dtype=np.float64)
        ln = np.asarray(loss.value(z, -1), dtype=np.float64)
        out.append((z, cache, W[i, 0] * lp.mean(), W[i, 1] * ln.mean()))
    return out


def empirical_risk(model: Model, bags: PointwiseBags, weights: RiskWeights, loss,
                   floor: bool = False) -> float:
    """Unbiased risk: sum over bags of the weighted mean losses.

    Signed weights mean the result can be negative. With ``floor=True`` the
    positive-class and negative-class parts are each clipped at zero.
    """
    _check_bags(bags)
    loss = as_loss(loss)
    terms = _bag_terms(model, bags, weights, loss)
    pos = sum(t[2] for t in terms)
    neg = sum(t[3] for t in terms)
    if floor:
        return float(max(pos, 0.0) + max(neg, 0.0))
    return float(pos + neg)


def risk_gradient(model: Model, bags: PointwiseBags, weights: RiskWeights, loss,
                  floor: bool = False) -> np.ndarray:
    _check_bags(bags)
    loss = as_loss(loss)
    W = weights.as_array()
    cpos = cneg = 1.0
    if floor:
        terms = _bag_terms(model, bags, weights, loss)
        cpos = float(sum(t[2] for t in terms) >= 0.0)
        cneg = float(sum(t[3] for t in terms) >= 0.0)
    grad = np.zeros_like(model.params)
    for i, bag in enumerate(bags):
        z, cache = model.forward(bag)
        dz = (cpos * W[i, 0] * np.asarray(loss.derivative(z, 1))
              + cneg * W[i, 1] * np.asarray(loss.derivative(z, -1))) / len(bag)
        grad += model.backward(cache, dz)
    return grad


@dataclass
class TrainConfig:
    loss: str = "double_hinge"
    model: str = "linear"
    hidden_width: int = 100
    learning_rate: float = 1e-3
    epochs: int = 200
    batch_size: int = 0
    seed: int = 0
    pi_plus: float | None = None      # None: estimate from bag sizes
    pi_test: float | None = None      # None: same as pi_plus
    guard: float = DEFAULT_GUARD
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    optimizer: str = "adam"           # or "gd" (plain full-step gradient descent)
    weight_decay: float = 0.0
    floor_risk: bool = False
    standardize: bool = False

    def __post_init__(self):
        self.loss = normalize_kind(self.loss)
        if not self.learning_rate > 0:
            raise DomainError("learning_rate must be positive")
        if self.epochs < 0:
            raise DomainError("epochs must be non-negative")
        if self.batch_size < 0:
            raise DomainError("batch_size must be non-negative")
        if self.optimizer not in ("adam", "gd"):
            raise DomainError(f"unknown optimizer {self.optimizer!r}")
        if self.model not in MODEL_KINDS:
            raise DomainError(f"unknown model kind {self.model!r}")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class TrainTrace:
    pi_plus: float
    pi_test: float
    risk: list[float] = field(default_factory=list)


class Adam:
    """Adam with bias-corrected moments; step ``lr * m_hat / (sqrt(v_hat) + eps)``."""

    def __init__(self, size, lr=1e-3, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.m = np.zeros(size)
        self.v = np.zeros(size)
        self.t = 0

    def step(self, params, grad):
        self.t += 1
        self.m = self.beta1 * self.m + (1.0 - self.beta1) * grad
        self.v = self.beta2 * self.v + (1.0 - self.beta2) * grad * grad
        m_hat = self.m / (1.0 - self.beta1 ** self.t)
        v_hat = self.v / (1.0 - self.beta2 ** self.t)
        return params - self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


def resolve_prior(bags: PointwiseBags, config: TrainConfig) -> tuple[float, float]:
    """``(pi_plus, pi_test)``: explicit values win over the count estimate."""
    if config.pi_plus is not None:
        pi_plus = float(config.pi_plus)
    else:
        _, n1, n2 = bags.sizes
        pi_plus = estimate_prior(n1, n2)
    pi_test = pi_plus if config.pi_test is None else float(config.pi_test)
    return pi_plus, pi_test


def _standardizer(points):
    shift = points.mean(axis=0)
    scale = points.std(axis=0)
    scale[scale == 0.0] = 1.0
    return shift, scale


def train(bags: PointwiseBags, config: TrainConfig, model: Model | None = None):
    """Minimize the unbiased risk; returns ``(model, trace)``.

    ``trace.risk`` holds the full-batch empirical risk after each epoch.
    Deterministic given ``config.seed``.
    """
    _check_bags(bags)
    pi_plus, pi_test = resolve_prior(bags, config)
    weights = risk_weights(pi_plus, pi_test, guard=config.guard)
    log.info("training with pi_plus=%.6g pi_test=%.6g", pi_plus, pi_test)
    loss = SurrogateLoss(config.loss)
    d = bags.bag1.shape[1]
    if model is None:
        model = init_model(config.model, d, config.hidden_width, config.seed)
        if config.standardize:
            model.shift, model.scale = _standardizer(bags.all_points())
    trace = TrainTrace(pi_plus, pi_test)
    if config.epochs == 0:
        return model, trace

    rng = CounterStream(config.seed).generator(2)
    opt = Adam(model.params.size, config.learning_rate, config.beta1, config.beta2, config.eps)
    params = model.params.copy()
    if config.batch_size:
        steps = max(1, math.ceil(max(bags.sizes) / config.batch_size))
    else:
        steps = 1
    for epoch in range(config.epochs):
        for _ in range(steps):
            if config.batch_size:
                batch = PointwiseBags(*(bag[rng.integers(0, len(bag), config.batch_size)] for bag in bags))
            else:
                batch = bags
            current = model.with_params(params)
            grad = risk_gradient(current, batch, weights, loss, config.floor_risk)
            if config.weight_decay:
                grad = grad + config.weight_decay * params
            if config.optimizer == "adam":
                params = opt.step(params, grad)
            else:
                params = params - config.learning_rate * grad
        risk = empirical_risk(model.with_params(params), bags, weights, loss, config.floor_risk)
        if not (math.isfinite(risk) and np.all(np.isfinite(params))):
            raise DivergenceError(f"risk became non-finite at epoch {epoch + 1}")
        trace.risk.append(risk)
    return model.with_params(params), trace


def save_model(model: Model, path) -> None:
    Path(path).write_text(json.dumps(model.to_dict()) + "\n", encoding="utf-8")


def load_model(path) -> Model:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise DataError(f"{path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: invalid JSON ({exc})") from None
    return Model.from_dict(obj)

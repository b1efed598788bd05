"""Triplet generation, keep/flip routing, pointwise aggregation and file I/O.

Three labeled draws ``(x_a, y_a), (x_b, y_b), (x_c, y_c)`` form a triplet.
The user flips it exactly when ``y_a == y_c != y_b``; every other label
pattern (ties included) is kept. Labels are discarded after routing.
"""
from __future__ import annotations

import csv
import enum
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Protocol, Sequence

import numpy as np

from .errors import DataError, DomainError
from .rng import CounterStream

LANE_LABEL = 0
LANE_INDEX = 1
LANE_PERM = 2
LANE_FEATURE0 = 16


class Feedback(str, enum.Enum):
    KEEP = "keep"
    FLIP = "flip"


@dataclass(frozen=True)
class LabeledExample:
    x: np.ndarray
    y: int

    def __post_init__(self):
        if self.y not in (1, -1):
            raise DomainError(f"label must be +1 or -1, got {self.y}")


@dataclass(frozen=True)
class Triplet:
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray


@dataclass
class TripletDataset:
    """Keep set D1 and flip set D2, stored as ``(n, 3, d)`` arrays."""

    keep: np.ndarray
    flip: np.ndarray
    d: int

    def __post_init__(self):
        self.keep = np.asarray(self.keep, dtype=np.float64).reshape(-1, 3, self.d)
        self.flip = np.asarray(self.flip, dtype=np.float64).reshape(-1, 3, self.d)

    @property
    def n1(self) -> int:
        return self.keep.shape[0]

    @property
    def n2(self) -> int:
        return self.flip.shape[0]

    def __len__(self):
        return self.n1 + self.n2

    @classmethod
    def empty(cls, d: int) -> "TripletDataset":
        return cls(np.empty((0, 3, d)), np.empty((0, 3, d)), d)

    @classmethod
    def from_triplets(cls, keep: Sequence[Triplet], flip: Sequence[Triplet], d: int | None = None):
        first = next(iter(list(keep) + list(flip)), None)
        if d is None:
            if first is None:
                raise DataError("cannot infer dimension from an empty triplet list")
            d = len(first.a)

        def stack(ts):
            return np.array([[t.a, t.b, t.c] for t in ts], dtype=np.float64).reshape(-1, 3, d)

        return cls(stack(keep), stack(flip), d)

    def triplets(self, kind: Feedback | str) -> Iterator[Triplet]:
        arr = self.keep if Feedback(kind) is Feedback.KEEP else self.flip
        for row in arr:
            yield Triplet(row[0], row[1], row[2])


@dataclass
class PointwiseBags:
    """Samples from the three mixtures: positions a/c of all triplets,
    position b of kept triplets, position b of flipped triplets."""

    bag1: np.ndarray
    bag2: np.ndarray
    bag3: np.ndarray

    @property
    def sizes(self) -> tuple[int, int, int]:
        return (len(self.bag1), len(self.bag2), len(self.bag3))

    def __iter__(self):
        return iter((self.bag1, self.bag2, self.bag3))

    def all_points(self) -> np.ndarray:
        return np.concatenate([self.bag1, self.bag2, self.bag3])


@dataclass(frozen=True)
class GaussianSpec:
    mu_plus: Sequence[float]
    mu_minus: Sequence[float]
    sigma: float = 1.0
    pi_plus: float = 0.5

    def __post_init__(self):
        if self.sigma <= 0:
            raise DomainError("sigma must be positive")
        if len(self.mu_plus) != len(self.mu_minus):
            raise DomainError("class means must share a dimension")
        if not 0.0 <= self.pi_plus <= 1.0:
            raise DomainError("pi_plus must lie in [0, 1]")

    @property
    def d(self) -> int:
        return len(self.mu_plus)


class LabeledSource(Protocol):
    d: int

    def draw(self, stream: CounterStream, index: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Labeled example for each draw index: ``(X[n, d], y[n])``."""


def _labels_from_uniform(u, pi_plus):
    return np.where(u < pi_plus, 1, -1).astype(np.int64)


class GaussianSource:
    """Two isotropic Gaussians with a shared standard deviation."""

    def __init__(self, spec: GaussianSpec):
        self.spec = spec
        self.d = spec.d
        self._mu = {1: np.asarray(spec.mu_plus, float), -1: np.asarray(spec.mu_minus, float)}

    def draw(self, stream, index):
        index = np.asarray(index, dtype=np.uint64)
        y = _labels_from_uniform(stream.uniform(index, LANE_LABEL), self.spec.pi_plus)
        noise = np.column_stack([stream.normal(index, LANE_FEATURE0 + k) for k in range(self.d)])
        means = np.where((y == 1)[:, None], self._mu[1], self._mu[-1])
        return means + self.spec.sigma * noise.reshape(len(index), self.d), y


class PoolSource:
    """Uniform draws from a finite labeled pool.

    With ``replace=False`` draw ``i`` takes the ``i``-th element of a
    seed-determined permutation; this is off-theory (draws are no longer
    independent) and raises :class:`DataError` once the pool is used up.
    """

    def __init__(self, X, y, replace: bool = True):
        self.X = np.asarray(X, dtype=np.float64)
        self.y = np.asarray(y, dtype=np.int64)
        if self.X.ndim != 2 or len(self.X) != len(self.y):
            raise DataError("pool features must be 2-D and aligned with labels")
        if len(self.X) == 0:
            raise DataError("empty labeled pool")
        if not np.all(np.isin(self.y, (1, -1))):
            raise DataError("pool labels must be +1 or -1")
        self.d = self.X.shape[1]
        self.replace = replace

    @classmethod
    def from_examples(cls, examples: Sequence[LabeledExample], replace: bool = True):
        X, y = examples_to_arrays(examples)
        return cls(X, y, replace=replace)

    @property
    def prior(self) -> float:
        return float(np.mean(self.y == 1))

    def draw(self, stream, index):
        index = np.asarray(index, dtype=np.uint64)
        size = len(self.X)
        if self.replace:
            rows = stream.integers(index, size, LANE_INDEX)
        else:
            if len(index) and int(index.max()) >= size:
                raise DataError(
                    f"pool of {size} examples exhausted (draw {int(index.max())}) with replacement disabled")
            perm = np.argsort(stream.uniform(np.arange(size, dtype=np.uint64), LANE_PERM), kind="stable")
            rows = perm[index.astype(np.int64)]
        return self.X[rows], self.y[rows]


@dataclass
class LabeledSampler:
    """A source bound to a seed: a reproducible stream of labeled examples."""

    source: LabeledSource
    seed: int
    d: int = field(init=False)

    def __post_init__(self):
        self.d = self.source.d
        self._stream = CounterStream(self.seed)

    def draw(self, stream, index):
        return self.source.draw(stream, index)

    def sample(self, n: int, start: int = 0) -> tuple[np.ndarray, np.ndarray]:
        """Examples ``start .. start+n-1`` of this sampler's stream."""
        return self.source.draw(self._stream, np.arange(start, start + n, dtype=np.uint64))

    def __iter__(self) -> Iterator[LabeledExample]:
        i = 0
        while True:
            X, y = self.sample(1024, i)
            for x, label in zip(X, y):
                yield LabeledExample(x, int(label))
            i += 1024


def sample_gaussian(spec: GaussianSpec, seed: int) -> LabeledSampler:
    return LabeledSampler(GaussianSource(spec), seed)


def route_labels(y) -> np.ndarray:
    """Vectorized routing: boolean flip mask for an ``(n, 3)`` label array."""
    y = np.asarray(y)
    if not np.all(np.isin(y, (1, -1))):
        raise DomainError("labels must be +1 or -1")
    return (y[..., 0] == y[..., 2]) & (y[..., 0] != y[..., 1])


def route_label_pattern(y_a: int, y_b: int, y_c: int) -> Feedback:
    """Flip for (+,-,+) and (-,+,-); keep for the other six patterns."""
    return Feedback.FLIP if route_labels([y_a, y_b, y_c]) else Feedback.KEEP


def generate_triplets(source: LabeledSource, n: int, seed: int) -> TripletDataset:
    """Draw ``n`` triplets of independent examples and route them by feedback.

    Triplet ``i`` uses draw indices ``3i, 3i+1, 3i+2`` of the seed's stream,
    so the result does not depend on how the work is chunked.
    """
    if n < 0:
        raise DomainError("triplet count must be non-negative")
    d = source.d
    if n == 0:
        return TripletDataset.empty(d)
    stream = CounterStream(seed)
    X, y = source.draw(stream, np.arange(3 * n, dtype=np.uint64))
    X = X.reshape(n, 3, d)
    flip = route_labels(y.reshape(n, 3))
    return TripletDataset(X[~flip], X[flip], d)


def aggregate_pointwise(data: TripletDataset) -> PointwiseBags:
    bag1 = np.concatenate([data.keep[:, 0], data.keep[:, 2], data.flip[:, 0], data.flip[:, 2]])
    return PointwiseBags(bag1.reshape(-1, data.d), data.keep[:, 1].copy(), data.flip[:, 1].copy())


def examples_to_arrays(examples: Sequence[LabeledExample]) -> tuple[np.ndarray, np.ndarray]:
    if not examples:
        raise DataError("no labeled examples")
    X = np.array([e.x for e in examples], dtype=np.float64)
    y = np.array([e.y for e in examples], dtype=np.int64)
    return X, y


_LABELS = {1.0: 1, -1.0: -1, 0.0: -1}


def _is_number(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def load_labeled_csv(path) -> list[LabeledExample]:
    """Read a comma-separated file whose last column is the label.

    A leading row with any non-numeric cell is treated as a header. Labels
    may be +1/-1 or 1/0 (0 maps to -1).
    """
    path = Path(path)
    examples: list[LabeledExample] = []
    d = None
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"{path}: {exc.strerror}") from exc
    with fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not cell.strip() for cell in row):
                continue
            cells = [cell.strip() for cell in row]
            if lineno == 1 and not all(_is_number(c) for c in cells):
                continue
            if len(cells) < 2:
                raise DataError(f"{path}:{lineno}: need at least one feature and a label")
            if d is None:
                d = len(cells) - 1
            elif len(cells) - 1 != d:
                raise DataError(f"{path}:{lineno}: expected {d} features, found {len(cells) - 1}")
            try:
                x = np.array([float(c) for c in cells[:-1]])
                raw = float(cells[-1])
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: non-numeric value ({exc})") from None
            if raw not in _LABELS:
                raise DataError(f"{path}:{lineno}: label {cells[-1]!r} not in {{+1, -1, 1, 0}}")
            if not np.all(np.isfinite(x)):
                raise DataError(f"{path}:{lineno}: non-finite feature")
            examples.append(LabeledExample(x, _LABELS[raw]))
    if not examples:
        raise DataError(f"{path}: no data rows")
    return examples


def write_labeled_csv(path, X, y) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        d = np.asarray(X).shape[1]
        w.writerow([f"x{k}" for k in range(d)] + ["label"])
        for x, label in zip(np.asarray(X), np.asarray(y)):
            w.writerow([repr(float(v)) for v in x] + [int(label)])


def write_triplets(data: TripletDataset, path) -> None:
    """JSON lines, keep set first; float repr round-trips exactly."""
    with open(path, "w", encoding="utf-8") as fh:
        for kind, arr in ((Feedback.KEEP, data.keep), (Feedback.FLIP, data.flip)):
            for row in arr:
                rec = {"kind": kind.value, "a": row[0].tolist(), "b": row[1].tolist(), "c": row[2].tolist()}
                fh.write(json.dumps(rec) + "\n")


def read_triplets(path) -> TripletDataset:
    path = Path(path)
    keep, flip = [], []
    d = None
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise DataError(f"{path}: {exc.strerror}") from exc
    with fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                kind = Feedback(rec["kind"])
                vecs = [np.asarray(rec[k], dtype=np.float64) for k in ("a", "b", "c")]
            except (ValueError, KeyError, TypeError) as exc:
                raise DataError(f"{path}:{lineno}: malformed triplet record ({exc})") from None
            dims = {v.shape for v in vecs}
            if len(dims) != 1 or vecs[0].ndim != 1:
                raise DataError(f"{path}:{lineno}: triplet vectors have mixed dimensions")
            if d is None:
                d = vecs[0].shape[0]
            elif vecs[0].shape[0] != d:
                raise DataError(f"{path}:{lineno}: dimension {vecs[0].shape[0]} differs from {d}")
            (keep if kind is Feedback.KEEP else flip).append(vecs)
    if d is None:
        raise DataError(f"{path}: no triplets")
    return TripletDataset(np.array(keep).reshape(-1, 3, d), np.array(flip).reshape(-1, 3, d), d)

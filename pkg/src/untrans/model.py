"""Class-weighted linear SVM trained by deterministic Pegasos-style
subgradient descent.

The primal objective, with ``lam = 1 / (C * N)``, is::

    lam / 2 * ||w||^2 + 1/N * sum_i c(y_i) * max(0, 1 - y_i * (w . x_i + b))

The bias is learned as the weight of a constant feature. Features are
max-abs scaled for training and the scale is folded back into the stored
weights, so scores on raw feature vectors are unaffected.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ParseError, TrainingError

MAGIC = "itl-model v1"
CLASS_WEIGHT_MODES = ("inverse-frequency", "uniform")
DEFAULT_GRID = (0.01, 0.1, 1.0, 10.0, 100.0)


@dataclass(frozen=True)
class TrainConfig:
    C: float = 1.0
    epochs: int = 20
    seed: int = 42
    class_weight_mode: str = "inverse-frequency"

    def __post_init__(self):
        if not self.C > 0:
            raise DomainError("C must be > 0")
        if self.epochs < 1:
            raise DomainError("epochs must be >= 1")
        if self.class_weight_mode not in CLASS_WEIGHT_MODES:
            raise DomainError(f"class_weight_mode must be one of {CLASS_WEIGHT_MODES}")


@dataclass
class LinearModel:
    weights: dict
    bias: float
    config: TrainConfig = field(default_factory=TrainConfig)
    feature_registry_version: str = ""
    class_weights: dict = field(default_factory=dict)
    feature_config: dict | None = None
    loss_history: list = field(default_factory=list, compare=False)

    def __post_init__(self):
        if not math.isfinite(self.bias) or not all(math.isfinite(w) for w in self.weights.values()):
            raise DomainError("model weights must be finite")


def class_weights(labels, mode="inverse-frequency") -> dict:
    """Per-class weights; inverse-frequency gives ``N / (2 * N_c)``."""
    n = len(labels)
    counts = {c: sum(1 for y in labels if y == c) for c in ("I", "O")}
    if mode == "uniform":
        return {"I": 1.0, "O": 1.0}
    if mode != "inverse-frequency":
        raise DomainError(f"unknown class weight mode {mode!r}")
    return {c: n / (2.0 * counts[c]) for c in ("I", "O") if counts[c]}


class FeatureRegistry:
    """Maps feature names to contiguous column indices (sorted by name)."""

    def __init__(self, names):
        self.names = sorted(set(names))
        self.index = {n: i for i, n in enumerate(self.names)}

    def __len__(self):
        return len(self.names)

    def matrix(self, vectors):
        X = np.zeros((len(vectors), len(self.names)))
        for r, v in enumerate(vectors):
            for name, val in v.items():
                c = self.index.get(name)
                if c is not None:
                    X[r, c] = val
        return X


def objective(w, X, y, sample_weight, lam):
    margins = y * (X @ w)
    hinge = np.maximum(0.0, 1.0 - margins)
    return 0.5 * lam * float(w @ w) + float(np.mean(sample_weight * hinge))


def _pegasos(X, y, sample_weight, lam, epochs, seed):
    """Per-example Pegasos with step 1/(lam*t) and ball projection.

    Returns the iterate with the lowest objective seen at an epoch boundary
    and the per-epoch best-so-far objective.
    """
    n, d = X.shape
    rng = np.random.default_rng(seed)
    radius = math.sqrt(2.0 * float(np.mean(sample_weight)) / lam)
    # w = scale * v keeps the shrink step O(1)
    v = np.zeros(d)
    scale = 1.0
    sq_norm = 0.0
    best_w = np.zeros(d)
    best_obj = objective(best_w, X, y, sample_weight, lam)
    history = []
    t = 0
    for _ in range(epochs):
        for i in rng.permutation(n):
            t += 1
            eta = 1.0 / (lam * t)
            xi = X[i]
            margin = y[i] * scale * float(xi @ v)
            shrink = 1.0 - eta * lam
            if shrink <= 0.0:
                v[:] = 0.0
                scale = 1.0
                sq_norm = 0.0
            else:
                scale *= shrink
                sq_norm *= shrink * shrink
            if margin < 1.0:
                step = eta * sample_weight[i] * y[i]
                dot = float(xi @ v)
                sq_norm += 2.0 * step * scale * dot + step * step * float(xi @ xi)
                v += (step / scale) * xi
            norm = math.sqrt(max(sq_norm, 0.0))
            if norm > radius:
                scale *= radius / norm
                sq_norm = radius * radius
            if scale < 1e-9:
                v *= scale
                scale = 1.0
        w = scale * v
        obj = objective(w, X, y, sample_weight, lam)
        if obj < best_obj:
            best_obj = obj
            best_w = w.copy()
        history.append(best_obj)
    return best_w, history


def train(examples, config: TrainConfig = TrainConfig(), registry_version="") -> LinearModel:
    """Fit a linear model on ``(feature_vector, label)`` pairs with labels I/O."""
    vectors = [e[0] for e in examples]
    labels = [e[1] for e in examples]
    if not labels or len(set(labels)) < 2:
        raise TrainingError("training data must contain both I and O examples")
    if set(labels) - {"I", "O"}:
        raise TrainingError(f"labels must be I or O, got {sorted(set(labels) - {'I', 'O'})}")

    registry = FeatureRegistry(n for v in vectors for n in v)
    X = registry.matrix(vectors)
    scale = np.abs(X).max(axis=0) if len(registry) else np.zeros(0)
    scale[scale == 0] = 1.0
    Xs = np.hstack([X / scale, np.ones((len(X), 1))])
    y = np.array([1.0 if l == "I" else -1.0 for l in labels])
    cw = class_weights(labels, config.class_weight_mode)
    sw = np.array([cw[l] for l in labels])
    lam = 1.0 / (config.C * len(labels))

    w, history = _pegasos(Xs, y, sw, lam, config.epochs, config.seed)
    weights = {name: float(w[i] / scale[i]) for i, name in enumerate(registry.names)}
    return LinearModel(weights=weights, bias=float(w[-1]), config=config,
                       feature_registry_version=registry_version, class_weights=cw,
                       loss_history=history)


def decision_score(model: LinearModel, v: dict) -> float:
    s = model.bias
    w = model.weights
    for name, val in v.items():
        wi = w.get(name)
        if wi is not None:
            s += wi * val
    return s


def predict(model: LinearModel, v: dict, threshold: float = 0.0) -> str:
    return "I" if decision_score(model, v) > threshold else "O"


def hinge_violations(model: LinearModel, examples) -> int:
    """Training examples with functional margin below 1."""
    count = 0
    for v, label, *_ in examples:
        y = 1.0 if label == "I" else -1.0
        if y * decision_score(model, v) < 1.0:
            count += 1
    return count


# ---------------------------------------------------------------------------
# plain-text model file


def dumps(model: LinearModel) -> str:
    import json

    cfg = model.config
    out = io.StringIO()
    out.write(MAGIC + "\n")
    out.write(f"registry\t{model.feature_registry_version}\n")
    out.write(f"train\tC={cfg.C!r}\tepochs={cfg.epochs}\tseed={cfg.seed}\tclass_weight_mode={cfg.class_weight_mode}\n")
    out.write("class_weights\t" + "\t".join(f"{k}={v!r}" for k, v in sorted(model.class_weights.items())) + "\n")
    if model.feature_config is not None:
        out.write("features\t" + json.dumps(model.feature_config, sort_keys=True) + "\n")
    out.write(f"bias\t{model.bias!r}\n")
    for name in sorted(model.weights):
        out.write(f"{name}\t{model.weights[name]!r}\n")
    return out.getvalue()


def loads(text: str, path=None) -> LinearModel:
    import json

    lines = text.split("\n")
    if not lines or lines[0].strip() != MAGIC:
        raise ParseError(f"missing {MAGIC!r} header", path, 1)
    registry = ""
    cfg = {}
    cw = {}
    fcfg = None
    bias = None
    weights = {}
    for lineno, line in enumerate(lines[1:], 2):
        if not line:
            continue
        key, _, rest = line.partition("\t")
        try:
            if key == "registry":
                registry = rest
            elif key == "train":
                cfg = dict(item.split("=", 1) for item in rest.split("\t"))
            elif key == "class_weights":
                cw = {k: float(v) for k, v in (item.split("=", 1) for item in rest.split("\t") if item)}
            elif key == "features":
                fcfg = json.loads(rest)
            elif key == "bias" and bias is None:
                bias = float(rest)
            else:
                weights[key] = float(rest)
        except ValueError as exc:
            raise ParseError(f"malformed line: {exc}", path, lineno) from None
    if bias is None:
        raise ParseError("missing bias line", path)
    config = TrainConfig(C=float(cfg.get("C", 1.0)), epochs=int(cfg.get("epochs", 20)),
                         seed=int(cfg.get("seed", 42)),
                         class_weight_mode=cfg.get("class_weight_mode", "inverse-frequency"))
    return LinearModel(weights, bias, config, registry, cw, fcfg)


def save_model(model: LinearModel, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(model))


def load_model(path) -> LinearModel:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read(), path=str(path))

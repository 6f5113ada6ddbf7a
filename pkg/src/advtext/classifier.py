"""Built-in differentiable two-class text classifier.

Frozen word embeddings are pooled (mean, or a single 1-D convolution followed
by max pooling over time), passed through one rectified hidden layer and a
two-way softmax. Training is plain mini-batch SGD on mean cross-entropy plus
an L2 penalty on the weight matrices.
"""

from __future__ import annotations

import json
import struct
import warnings
import zlib
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import (
    ConfigError,
    CorruptFile,
    EmptyClass,
    EmptyDocument,
    EmptyDocumentWarning,
    NotBinary,
    VersionMismatch,
)
from .lexicons import EmbeddingTable
from .textcore import Corpus, Document

MAGIC = b"ADVTXT01"
FORMAT_VERSION = 1
ARCHITECTURES = ("mean-pool", "conv")
_HEADER = struct.Struct("<8sII")


@dataclass(frozen=True)
class ModelConfig:
    hidden_units: int = 64
    epochs: int = 10
    learning_rate: float = 0.05
    batch_size: int = 32
    seed: int = 0
    l2: float = 1e-4
    architecture: str = "mean-pool"
    conv_window: int = 3

    def __post_init__(self):
        for name in ("hidden_units", "epochs", "batch_size", "conv_window"):
            if int(getattr(self, name)) <= 0:
                raise ConfigError(f"{name} must be a positive integer", field=name)
        if not self.learning_rate > 0:
            raise ConfigError("learning_rate must be positive", field="learning_rate")
        if self.l2 < 0:
            raise ConfigError("l2 must be non-negative", field="l2")
        if self.architecture not in ARCHITECTURES:
            raise ConfigError(f"architecture must be one of {ARCHITECTURES}", field="architecture")


@dataclass
class Model:
    config: ModelConfig
    embeddings: EmbeddingTable
    hidden_weights: np.ndarray
    hidden_bias: np.ndarray
    output_weights: np.ndarray
    output_bias: np.ndarray
    label_order: tuple
    loss_history: list = field(default_factory=list)

    @property
    def embedding_dim(self) -> int:
        return self.embeddings.dimension

    def label_index(self, label) -> int:
        try:
            return self.label_order.index(label)
        except ValueError:
            raise KeyError(f"label {label!r} not in model labels {self.label_order}") from None

    def embed(self, doc: Document) -> np.ndarray:
        """Token embedding matrix of ``doc`` (one row per token, OTHER included)."""
        return self.embeddings.lookup_many(doc.words)


def _softmax(z):
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def mean_pool(E: np.ndarray) -> np.ndarray:
    """Column means summed in sorted order, so any row permutation gives
    bit-identical output."""
    return np.sort(E, axis=0).mean(axis=0)


def _windows(E, w):
    """Stack each length-``w`` window of rows of ``E`` into one row; zero-pad short docs."""
    n, d = E.shape
    T = max(n - w + 1, 1)
    padded = np.zeros((T + w - 1, d))
    padded[:n] = E
    return np.stack([padded[t:t + w].reshape(-1) for t in range(T)])


def _pool(model, E):
    """Hidden pre-activation for one document plus what backprop needs."""
    if model.config.architecture == "mean-pool":
        x = mean_pool(E)
        return model.hidden_weights @ x + model.hidden_bias, x
    X = _windows(E, model.config.conv_window)
    A = X @ model.hidden_weights.T + model.hidden_bias
    idx = A.argmax(axis=0)
    return A[idx, np.arange(A.shape[1])], (X, idx)


def _head(model, a):
    h = np.maximum(a, 0.0)
    return _softmax(model.output_weights @ h + model.output_bias), h


def proba_from_embeddings(model: Model, E: np.ndarray) -> np.ndarray:
    """Class posteriors (in ``model.label_order``) for a token embedding matrix."""
    if len(E) == 0:
        warnings.warn("empty document: returning uniform posterior", EmptyDocumentWarning, stacklevel=2)
        return np.full(2, 0.5)
    a, _ = _pool(model, E)
    p, _ = _head(model, a)
    return p


def proba_from_pooled(model: Model, X: np.ndarray) -> np.ndarray:
    """Batched posteriors for mean-pooled inputs, shape (B, d) -> (B, 2)."""
    A = X @ model.hidden_weights.T + model.hidden_bias
    H = np.maximum(A, 0.0)
    return _softmax(H @ model.output_weights.T + model.output_bias)


def predict_proba(model: Model, doc: Document) -> np.ndarray:
    return proba_from_embeddings(model, model.embed(doc))


def predict_label(model: Model, doc: Document):
    return model.label_order[int(np.argmax(predict_proba(model, doc)))]


def predict_many(model: Model, docs: Sequence[Document]) -> np.ndarray:
    """Posterior matrix (len(docs), 2)."""
    # one code path with predict_proba, so argmax decisions agree bit-for-bit
    if not docs:
        return np.zeros((0, 2))
    return np.stack([predict_proba(model, d) for d in docs])


def gradient_from_embeddings(model: Model, E: np.ndarray, label_index: int) -> np.ndarray:
    """d(cross-entropy at ``label_index``)/dE, same shape as ``E``."""
    if len(E) == 0:
        raise EmptyDocument("input gradient of an empty document is undefined")
    a, cache = _pool(model, E)
    p, _ = _head(model, a)
    dz = p.copy()
    # p - 1 cancels badly when the softmax saturates; the other classes' mass does not
    dz[label_index] = -np.delete(p, label_index).sum()
    da = (model.output_weights.T @ dz) * (a > 0)
    if model.config.architecture == "mean-pool":
        dx = model.hidden_weights.T @ da
        return np.tile(dx / len(E), (len(E), 1))
    X, idx = cache
    n, d = E.shape
    w = model.config.conv_window
    dX = np.zeros_like(X)
    np.add.at(dX, idx, da[:, None] * model.hidden_weights)
    dE = np.zeros((n, d))
    for t in range(len(X)):
        for o in range(w):
            if t + o < n:
                dE[t + o] += dX[t, o * d:(o + 1) * d]
    return dE


def input_gradient(model: Model, doc: Document, label) -> np.ndarray:
    """Gradient of the cross-entropy at (doc, label) w.r.t. each token's embedding."""
    if len(doc) == 0:
        raise EmptyDocument(f"document {doc.id!r} has no tokens")
    return gradient_from_embeddings(model, model.embed(doc), model.label_index(label))


def loss(model: Model, doc: Document, label) -> float:
    p = predict_proba(model, doc)
    return float(-np.log(max(p[model.label_index(label)], 1e-300)))


# -- training -----------------------------------------------------------------

def _check_binary(corpus: Corpus):
    if len(corpus.labels) != 2:
        raise NotBinary(f"training needs exactly 2 labels, got {sorted(corpus.labels)}")
    labels = sorted(corpus.labels)
    for lab in labels:
        if not any(d.label == lab and len(d) for d in corpus.documents):
            raise EmptyClass(f"no non-empty documents with label {lab!r}")
    return tuple(labels)


def _init_params(rng, shape):
    return rng.uniform(-0.05, 0.05, size=shape)


def train(corpus: Corpus, table: EmbeddingTable, config: Optional[ModelConfig] = None) -> Model:
    config = config or ModelConfig()
    label_order = _check_binary(corpus)
    docs = [d for d in corpus.documents if len(d)]
    y = np.array([label_order.index(d.label) for d in docs])

    init_rng, shuffle_rng = (np.random.default_rng(s) for s in np.random.SeedSequence(config.seed).spawn(2))
    H, dim = config.hidden_units, table.dimension
    fan_in = dim * (config.conv_window if config.architecture == "conv" else 1)
    model = Model(
        config=config,
        embeddings=table,
        hidden_weights=_init_params(init_rng, (H, fan_in)),
        hidden_bias=_init_params(init_rng, H),
        output_weights=_init_params(init_rng, (2, H)),
        output_bias=_init_params(init_rng, 2),
        label_order=label_order,
    )
    if config.architecture == "mean-pool":
        inputs = np.stack([mean_pool(table.lookup_many(d.words)) for d in docs])
        step = _sgd_step_meanpool
    else:
        inputs = [_windows(table.lookup_many(d.words), config.conv_window) for d in docs]
        step = _sgd_step_conv

    for _ in range(config.epochs):
        order = shuffle_rng.permutation(len(docs))
        total = 0.0
        for start in range(0, len(order), config.batch_size):
            batch = order[start:start + config.batch_size]
            total += step(model, inputs, y, batch) * len(batch)
        model.loss_history.append(total / len(docs))
    return model


def _apply(model, gW1, gb1, gW2, gb2):
    cfg = model.config
    lr = cfg.learning_rate
    model.hidden_weights -= lr * (gW1 + cfg.l2 * model.hidden_weights)
    model.hidden_bias -= lr * gb1
    model.output_weights -= lr * (gW2 + cfg.l2 * model.output_weights)
    model.output_bias -= lr * gb2


def _sgd_step_meanpool(model, inputs, y, batch):
    X = inputs[batch]
    B = len(batch)
    A = X @ model.hidden_weights.T + model.hidden_bias
    Hh = np.maximum(A, 0.0)
    P = _softmax(Hh @ model.output_weights.T + model.output_bias)
    ce = -np.log(np.maximum(P[np.arange(B), y[batch]], 1e-300)).mean()
    dZ = P.copy()
    dZ[np.arange(B), y[batch]] -= 1.0
    dZ /= B
    dA = (dZ @ model.output_weights) * (A > 0)
    _apply(model, dA.T @ X, dA.sum(axis=0), dZ.T @ Hh, dZ.sum(axis=0))
    return ce


def _sgd_step_conv(model, inputs, y, batch):
    gW1 = np.zeros_like(model.hidden_weights)
    gb1 = np.zeros_like(model.hidden_bias)
    gW2 = np.zeros_like(model.output_weights)
    gb2 = np.zeros_like(model.output_bias)
    B = len(batch)
    ce = 0.0
    cols = np.arange(model.config.hidden_units)
    for i in batch:
        X = inputs[i]
        A = X @ model.hidden_weights.T + model.hidden_bias
        idx = A.argmax(axis=0)
        a = A[idx, cols]
        p, h = _head(model, a)
        ce -= np.log(max(p[y[i]], 1e-300))
        dz = p.copy()
        dz[y[i]] -= 1.0
        da = (model.output_weights.T @ dz) * (a > 0)
        gW2 += np.outer(dz, h)
        gb2 += dz
        gW1 += da[:, None] * X[idx]
        gb1 += da
    _apply(model, gW1 / B, gb1 / B, gW2 / B, gb2 / B)
    return ce / B


# -- persistence ----------------------------------------------------------------

_ARRAYS = ("hidden_weights", "hidden_bias", "output_weights", "output_bias")


def save_model(model: Model, path):
    arrays = [getattr(model, name) for name in _ARRAYS] + [model.embeddings.matrix]
    payload = b"".join(np.ascontiguousarray(a, dtype="<f8").tobytes() for a in arrays)
    meta = {
        "config": asdict(model.config),
        "label_order": list(model.label_order),
        "embedding_dim": model.embedding_dim,
        "vocabulary": model.embeddings.words,
        "arrays": [{"name": n, "shape": list(a.shape)}
                   for n, a in zip(_ARRAYS + ("embeddings",), arrays)],
        "loss_history": list(model.loss_history),
        "crc32": zlib.crc32(payload),
    }
    meta_bytes = json.dumps(meta, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, FORMAT_VERSION, len(meta_bytes)))
        fh.write(meta_bytes)
        fh.write(payload)


def load_model(path) -> Model:
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise CorruptFile(f"{path}: truncated header")
    magic, version, meta_len = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise CorruptFile(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
    if version > FORMAT_VERSION:
        raise VersionMismatch(version, FORMAT_VERSION)
    try:
        meta = json.loads(data[_HEADER.size:_HEADER.size + meta_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CorruptFile(f"{path}: unreadable metadata ({exc})") from None
    payload = data[_HEADER.size + meta_len:]
    if zlib.crc32(payload) != meta.get("crc32"):
        raise CorruptFile(f"{path}: weight payload checksum mismatch")
    arrays, offset = {}, 0
    for entry in meta["arrays"]:
        count = int(np.prod(entry["shape"]))
        chunk = payload[offset:offset + 8 * count]
        if len(chunk) != 8 * count:
            raise CorruptFile(f"{path}: truncated array {entry['name']}")
        arrays[entry["name"]] = np.frombuffer(chunk, dtype="<f8").reshape(entry["shape"]).astype(np.float64)
        offset += 8 * count
    if offset != len(payload):
        raise CorruptFile(f"{path}: {len(payload) - offset} trailing bytes")
    return Model(
        config=ModelConfig(**meta["config"]),
        embeddings=EmbeddingTable(meta["vocabulary"], arrays["embeddings"]),
        hidden_weights=arrays["hidden_weights"],
        hidden_bias=arrays["hidden_bias"],
        output_weights=arrays["output_weights"],
        output_bias=arrays["output_bias"],
        label_order=tuple(meta["label_order"]),
        loss_history=list(meta.get("loss_history", [])),
    )

"""Phrase composition: additive, multiplicative, recursive NN and recursive autoencoder.

The neural composers merge two n-dimensional vectors into one through
``f(W [w1; w2] + b)``. The autoencoder variant adds a decoder that maps the
hidden vector back to the 2n-dimensional input and is trained on the squared
reconstruction error with plain mini-batch gradient descent.
"""

import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import List, Optional

import numpy as np

from .errors import ConfigError, DimensionMismatchError, DivergenceError, ValidationError
from .textio import fmt_row, parse_floats

log = logging.getLogger(__name__)

ACTIVATIONS = ("tanh", "identity")
MODELS = ("add", "mult", "recnn", "rae")
_MODEL_ALIASES = {"additive": "add", "multiplicative": "mult"}
STRUCTURES = {"SVO": 3, "VO": 2}


def _act(name, z):
    if name == "tanh":
        return np.tanh(z)
    if name == "identity":
        return z
    raise ConfigError(f"unknown activation {name!r}")


def _act_grad(name, y):
    """Derivative of the activation, expressed through its output ``y``."""
    if name == "tanh":
        return 1.0 - y * y
    return np.ones_like(y)


@dataclass
class CompositionParams:
    W: np.ndarray
    b: np.ndarray
    activation: str = "tanh"
    W_dec: Optional[np.ndarray] = None
    b_dec: Optional[np.ndarray] = None
    normalize: bool = False  # unit-length hidden vectors (RAE encoder)

    def __post_init__(self):
        self.W = np.asarray(self.W, dtype=float)
        self.b = np.asarray(self.b, dtype=float)
        n = self.b.shape[0] if self.b.ndim == 1 else -1
        if self.W.shape != (n, 2 * n):
            raise ValidationError(f"W has shape {self.W.shape}, expected ({n}, {2 * n})")
        if self.activation not in ACTIVATIONS:
            raise ConfigError(f"unknown activation {self.activation!r}")
        if (self.W_dec is None) != (self.b_dec is None):
            raise ValidationError("decoder needs both W_dec and b_dec")
        if self.W_dec is not None:
            self.W_dec = np.asarray(self.W_dec, dtype=float)
            self.b_dec = np.asarray(self.b_dec, dtype=float)
            if self.W_dec.shape != (2 * n, n) or self.b_dec.shape != (2 * n,):
                raise ValidationError(
                    f"decoder shapes {self.W_dec.shape}, {self.b_dec.shape} do not fit n={n}"
                )
        for name, arr in self.arrays().items():
            if not np.all(np.isfinite(arr)):
                raise ValidationError(f"parameter {name} has non-finite values")

    @property
    def n(self):
        return self.b.shape[0]

    @property
    def has_decoder(self):
        return self.W_dec is not None

    def arrays(self):
        out = {"W": self.W, "b": self.b}
        if self.W_dec is not None:
            out["W_dec"] = self.W_dec
            out["b_dec"] = self.b_dec
        return out

    def copy(self):
        return replace(self, **{k: v.copy() for k, v in self.arrays().items()})

    def encoder(self):
        """The same parameters without the decoder (for RecNN reuse)."""
        return CompositionParams(self.W.copy(), self.b.copy(), self.activation,
                                 normalize=self.normalize)

    def __eq__(self, other):
        if not isinstance(other, CompositionParams):
            return NotImplemented
        a, b = self.arrays(), other.arrays()
        return (self.activation == other.activation and self.normalize == other.normalize
                and a.keys() == b.keys() and all(np.array_equal(a[k], b[k]) for k in a))


def init_params(n, rng, activation="tanh", decoder=True, normalize=False):
    """Uniform(-r, r) weights with r = 1/sqrt(2n); zero biases."""
    if n < 1:
        raise ConfigError(f"n must be >= 1, got {n}")
    r = 1.0 / np.sqrt(2 * n)
    W = rng.uniform(-r, r, size=(n, 2 * n))
    if not decoder:
        return CompositionParams(W, np.zeros(n), activation, normalize=normalize)
    W_dec = rng.uniform(-r, r, size=(2 * n, n))
    return CompositionParams(W, np.zeros(n), activation, W_dec, np.zeros(2 * n), normalize)


def _check_pair(w1, w2, n):
    w1 = np.asarray(w1, dtype=float)
    w2 = np.asarray(w2, dtype=float)
    if w1.shape != (n,) or w2.shape != (n,):
        raise DimensionMismatchError(
            f"inputs of shape {w1.shape} and {w2.shape} do not fit parameters for n={n}"
        )
    return np.concatenate([w1, w2])


def _as_list(vectors):
    vecs = [np.asarray(v, dtype=float) for v in vectors]
    if not vecs:
        raise ValidationError("nothing to compose")
    if len({v.shape for v in vecs}) != 1:
        raise DimensionMismatchError("vectors have different dimensions")
    return vecs


def compose_additive(vectors):
    vecs = _as_list(vectors)
    out = vecs[0].copy()
    for v in vecs[1:]:
        out = out + v
    return out


def compose_multiplicative(vectors):
    vecs = _as_list(vectors)
    out = vecs[0].copy()
    for v in vecs[1:]:
        out = out * v
    return out


def _encode(x, params):
    h = _act(params.activation, params.W @ x + params.b)
    if params.normalize:
        norm = np.linalg.norm(h)
        if norm > 0:
            h = h / norm
    return h


def recnn_step(w1, w2, params):
    """f(W [w1; w2] + b)."""
    x = _check_pair(w1, w2, params.n)
    with np.errstate(over="ignore", invalid="ignore"):
        v = _encode(x, params)
    if not np.all(np.isfinite(v)):
        raise DivergenceError("composition produced non-finite values")
    return v


def rae_step(w1, w2, params):
    """Encode, decode and score one pair: ``(hidden, reconstruction, loss)``."""
    if not params.has_decoder:
        raise ValidationError("RAE step needs decoder parameters")
    x = _check_pair(w1, w2, params.n)
    hidden = _encode(x, params)
    recon = _act(params.activation, params.W_dec @ hidden + params.b_dec)
    loss = 0.5 * float(np.sum((recon - x) ** 2))
    return hidden, recon, loss


def _as_batch(pairs, n):
    if isinstance(pairs, np.ndarray) and pairs.ndim == 2:
        X = np.asarray(pairs, dtype=float)
    else:
        X = np.array([_check_pair(a, b, n) for a, b in pairs], dtype=float)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValidationError("empty batch")
    if X.shape[1] != 2 * n:
        raise DimensionMismatchError(f"batch rows have length {X.shape[1]}, expected {2 * n}")
    return X


def rae_loss(params, pairs):
    """Mean reconstruction loss over a batch of pairs (or an (m, 2n) array)."""
    return _loss_and_grads(params, _as_batch(pairs, params.n), want_grads=False)[0]


def rae_gradients(params, pairs):
    """Exact gradient of the mean reconstruction loss for every parameter array."""
    if not params.has_decoder:
        raise ValidationError("RAE gradients need decoder parameters")
    return _loss_and_grads(params, _as_batch(pairs, params.n))[1]


def _loss_and_grads(params, X, want_grads=True):
    act = params.activation
    m = X.shape[0]
    H_raw = _act(act, X @ params.W.T + params.b)
    if params.normalize:
        norms = np.linalg.norm(H_raw, axis=1, keepdims=True)
        norms = np.where(norms > 0, norms, 1.0)
        H = H_raw / norms
    else:
        H = H_raw
    R = _act(act, H @ params.W_dec.T + params.b_dec)
    E = R - X
    loss = 0.5 * float(np.sum(E * E)) / m
    if not want_grads:
        return loss, None

    dR = E * _act_grad(act, R) / m
    grads = {"W_dec": dR.T @ H, "b_dec": dR.sum(axis=0)}
    dH = dR @ params.W_dec
    if params.normalize:
        # d(h/|h|) = (I - u u^T) / |h|
        dH = (dH - H * np.sum(dH * H, axis=1, keepdims=True)) / norms
    dZ = dH * _act_grad(act, H_raw)
    grads["W"] = dZ.T @ X
    grads["b"] = dZ.sum(axis=0)
    return loss, grads


@dataclass(frozen=True)
class RAEConfig:
    learning_rate: float = 0.01
    epochs: int = 100
    batch_size: int = 32
    activation: str = "tanh"
    normalize: bool = False
    seed: int = 0


@dataclass
class TrainResult:
    params: CompositionParams
    initial: CompositionParams
    losses: List[float] = field(default_factory=list)  # [initial, after epoch 1, ...]


def train_rae(pairs, n=None, config=RAEConfig(), rng=None):
    """Mini-batch gradient descent on the mean reconstruction loss.

    ``pairs`` is a sequence of ``(w1, w2)`` or an ``(m, 2n)`` array. The batch
    order is reshuffled each epoch. Raises ``DivergenceError`` naming the
    epoch if the loss stops being finite.
    """
    if n is None:
        if isinstance(pairs, np.ndarray) and pairs.ndim == 2:
            n = pairs.shape[1] // 2
        elif len(pairs) == 0:
            raise ValidationError("empty training set")
        else:
            n = len(pairs[0][0])
    X = _as_batch(pairs, n)
    if config.epochs < 0 or config.batch_size < 1 or config.learning_rate < 0:
        raise ConfigError(f"invalid training configuration: {config}")
    rng = rng if rng is not None else np.random.default_rng(config.seed)
    params = init_params(n, rng, config.activation, decoder=True, normalize=config.normalize)
    initial = params.copy()
    losses = [_loss_and_grads(params, X, want_grads=False)[0]]
    m = X.shape[0]
    lr = config.learning_rate
    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(m)
        # overflow is reported below as a DivergenceError
        with np.errstate(over="ignore", invalid="ignore"):
            for start in range(0, m, config.batch_size):
                batch = X[order[start:start + config.batch_size]]
                _, grads = _loss_and_grads(params, batch)
                if lr:
                    params.W -= lr * grads["W"]
                    params.b -= lr * grads["b"]
                    params.W_dec -= lr * grads["W_dec"]
                    params.b_dec -= lr * grads["b_dec"]
            loss = _loss_and_grads(params, X, want_grads=False)[0]
        if not np.isfinite(loss) or not all(np.all(np.isfinite(a)) for a in params.arrays().values()):
            raise DivergenceError(f"RAE training diverged at epoch {epoch}", epoch=epoch)
        losses.append(loss)
    log.debug("RAE loss %.6g -> %.6g over %d epochs", losses[0], losses[-1], config.epochs)
    return TrainResult(params, initial, losses)


def parse_model(name):
    key = _MODEL_ALIASES.get(name, name)
    if key not in MODELS:
        raise ConfigError(f"unknown model {name!r}; choose from {MODELS}")
    return key


def compose_phrase(vectors, structure, model, params=None):
    """Compose the word vectors of an SVO or VO phrase into one vector.

    The neural models use the tree (subject, (verb, object)) for SVO and
    (verb, object) for VO.
    """
    model = parse_model(model)
    if structure not in STRUCTURES:
        raise ValidationError(f"unknown structure {structure!r}")
    vectors = list(vectors)
    if len(vectors) != STRUCTURES[structure]:
        raise ValidationError(
            f"{structure} phrase needs {STRUCTURES[structure]} vectors, got {len(vectors)}"
        )
    if model == "add":
        return compose_additive(vectors)
    if model == "mult":
        return compose_multiplicative(vectors)
    if params is None:
        raise ConfigError(f"model {model!r} needs composition parameters")
    node = recnn_step(vectors[-2], vectors[-1], params)
    if structure == "SVO":
        node = recnn_step(vectors[0], node, params)
    return node


def save_params(params, path):
    lines = [f"N {params.n}", f"ACT {params.activation}"]
    if params.normalize:
        lines.append("NORM 1")
    for tag, key in (("W", "W"), ("B", "b"), ("WDEC", "W_dec"), ("BDEC", "b_dec")):
        arr = params.arrays().get(key)
        if arr is None:
            continue
        lines.append(tag)
        rows = arr if arr.ndim == 2 else arr[None, :]
        lines.extend(fmt_row(r) for r in rows)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_params(path):
    lines = [ln.strip() for ln in Path(path).read_text(encoding="utf-8").splitlines() if ln.strip()]
    if len(lines) < 2 or not lines[0].startswith("N ") or not lines[1].startswith("ACT "):
        raise ValidationError(f"{path}: missing N/ACT header")
    n = int(lines[0].split()[1])
    activation = lines[1].split()[1]
    pos = 2
    normalize = False
    if pos < len(lines) and lines[pos].startswith("NORM "):
        normalize = lines[pos].split()[1] == "1"
        pos += 1
    shapes = {"W": (n, 2 * n), "B": (1, n), "WDEC": (2 * n, n), "BDEC": (1, 2 * n)}
    found = {}
    while pos < len(lines):
        tag = lines[pos]
        if tag not in shapes:
            raise ValidationError(f"{path}: unexpected section {tag!r}")
        rows, cols = shapes[tag]
        block = lines[pos + 1:pos + 1 + rows]
        if len(block) != rows:
            raise ValidationError(f"{path}: section {tag} is truncated")
        found[tag] = np.array([parse_floats(r.split(), cols, f"{path} {tag}") for r in block])
        pos += 1 + rows
    if "W" not in found or "B" not in found:
        raise ValidationError(f"{path}: W and B sections are required")
    dec = found.get("WDEC"), found.get("BDEC")
    return CompositionParams(
        found["W"], found["B"][0], activation,
        dec[0], None if dec[1] is None else dec[1][0], normalize,
    )

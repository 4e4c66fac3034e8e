"""Dense feedforward classifiers with backprop through trainable activations.

A network is a stack of fully connected layers. Hidden layers apply one of
the ten activation kinds (all hidden layers share the kind; each hidden
layer owns its own copy of the trainable scalar where the kind has one)
followed by inverted dropout during training. The output layer is linear
and feeds a softmax cross-entropy head.

Weights start Xavier-uniform, U[-L, L] with L = sqrt(6 / (fan_in + fan_out)),
biases start at zero, and every parameter (weights, biases, activation
scalars) is updated by the same plain SGD rule p <- p - lr * g.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import activations
from .activations import ActivationSpec
from .data import Dataset, batches
from .numerics import Matrix, RandomStream, as_matrix

#: Hidden-plus-output layer widths of the standard benchmark topologies.
PRESET_WIDTHS = {
    "DNN-3A": (1024, 1024, 10),
    "DNN-3B": (1024, 512, 10),
    "DNN-4": (400, 300, 100, 10),
    "DNN-5A": (256, 128, 64, 32, 10),
    "DNN-5B": (512, 512, 512, 512, 10),
    "DNN-5C": (1024, 1024, 512, 256, 10),
    "DNN-6": (512, 256, 128, 64, 32, 10),
    "DNN-7": (784, 512, 256, 128, 64, 32, 10),
}

PRESET_NAMES = tuple(PRESET_WIDTHS)

_EVAL_CHUNK = 1024


@dataclass(frozen=True)
class NetworkConfig:
    """Architecture description: input width, layer widths, activation, dropout.

    layer_widths lists every layer including the output layer, so a
    "3-layer" preset like DNN-3A has layer_widths (1024, 1024, 10).
    dropout_rate is the drop probability applied to hidden activations
    during training only.
    """

    name: str
    input_dim: int
    layer_widths: tuple[int, ...]
    activation: ActivationSpec
    dropout_rate: float = 0.5

    def __post_init__(self):
        if self.input_dim < 1:
            raise ValueError(f"input_dim must be >= 1, got {self.input_dim}")
        if len(self.layer_widths) < 1:
            raise ValueError("layer_widths must contain at least the output layer")
        if any(w < 1 for w in self.layer_widths):
            raise ValueError(f"layer widths must be >= 1, got {self.layer_widths}")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ValueError(f"dropout_rate must be in [0, 1), got {self.dropout_rate}")
        object.__setattr__(self, "layer_widths", tuple(int(w) for w in self.layer_widths))

    @property
    def num_layers(self) -> int:
        return len(self.layer_widths)

    @property
    def num_hidden(self) -> int:
        return len(self.layer_widths) - 1

    @property
    def output_dim(self) -> int:
        return self.layer_widths[-1]

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "input_dim": self.input_dim,
            "layers": list(self.layer_widths),
            "activation": self.activation.to_json(),
            "dropout": self.dropout_rate,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "NetworkConfig":
        if not isinstance(obj, dict):
            raise ValueError("network config must be a JSON object")
        for key in ("name", "input_dim", "activation"):
            if key not in obj:
                raise ValueError(f"network config missing field {key!r}")
        name = obj["name"]
        if "layers" in obj:
            widths = tuple(int(w) for w in obj["layers"])
        elif name in PRESET_WIDTHS:
            widths = PRESET_WIDTHS[name]
        else:
            raise ValueError(
                f"network config {name!r} is not a preset and has no 'layers' field"
            )
        return cls(
            name=name,
            input_dim=int(obj["input_dim"]),
            layer_widths=widths,
            activation=ActivationSpec.from_json(obj["activation"]),
            dropout_rate=float(obj.get("dropout", 0.5)),
        )


def preset_config(
    name: str,
    activation: ActivationSpec,
    input_dim: int = 3072,
    dropout_rate: float = 0.5,
) -> NetworkConfig:
    """Config for one of the standard topologies (input_dim defaults to a
    32x32 RGB image)."""
    if name not in PRESET_WIDTHS:
        raise ValueError(f"unknown preset {name!r}; expected one of {PRESET_NAMES}")
    return NetworkConfig(
        name=name,
        input_dim=input_dim,
        layer_widths=PRESET_WIDTHS[name],
        activation=activation,
        dropout_rate=dropout_rate,
    )


@dataclass(frozen=True)
class TrainConfig:
    """Optimization settings. Defaults are the standard benchmark recipe."""

    learning_rate: float = 0.01
    dropout_rate: float = 0.5
    batch_size: int = 64
    epochs: int = 50
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate < 0:
            raise ValueError(f"learning_rate must be >= 0, got {self.learning_rate}")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ValueError(f"dropout_rate must be in [0, 1), got {self.dropout_rate}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.epochs < 0:
            raise ValueError(f"epochs must be >= 0, got {self.epochs}")

    def to_json(self) -> dict:
        return {
            "lr": self.learning_rate,
            "dropout": self.dropout_rate,
            "batch": self.batch_size,
            "epochs": self.epochs,
        }

    @classmethod
    def from_json(cls, obj: dict, seed: int = 0) -> "TrainConfig":
        if not isinstance(obj, dict):
            raise ValueError("train config must be a JSON object")
        return cls(
            learning_rate=float(obj.get("lr", 0.01)),
            dropout_rate=float(obj.get("dropout", 0.5)),
            batch_size=int(obj.get("batch", 64)),
            epochs=int(obj.get("epochs", 50)),
            seed=seed,
        )


@dataclass
class ForwardCache:
    """Everything backward() needs from one training-mode forward pass."""

    inputs: list[Matrix]  # what each layer consumed (inputs[0] is the batch)
    pre_acts: list[Matrix]  # z of each hidden layer
    masks: list[Matrix | None]  # dropout masks per hidden layer (0/1, unscaled)
    logits: Matrix
    keep_prob: float
    version: int

    @property
    def batch_size(self) -> int:
        return self.inputs[0].shape[0]


@dataclass
class Gradients:
    """Parameter gradients in the same layout as the network's parameters."""

    weights: list[Matrix]
    biases: list[Matrix]
    act_params: list[float]


def softmax_cross_entropy(logits: Matrix, labels: np.ndarray) -> tuple[float, Matrix]:
    """Mean cross-entropy loss and the softmax probabilities.

    Stable for logits of any magnitude: the row max is subtracted before
    exponentiation and the log term goes through log-sum-exp.
    """
    logits = as_matrix(logits)
    labels = np.asarray(labels)
    if labels.ndim != 1 or labels.shape[0] != logits.shape[0]:
        raise ValueError(
            f"labels shape {labels.shape} does not match logits rows {logits.shape[0]}"
        )
    n, c = logits.shape
    if labels.size and (labels.min() < 0 or labels.max() >= c):
        raise ValueError(f"labels must be in [0, {c - 1}]")
    shifted = logits - logits.max(axis=1, keepdims=True)
    log_norm = np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    log_probs = shifted - log_norm
    probs = np.exp(log_probs)
    loss = -float(log_probs[np.arange(n), labels].mean())
    return loss, probs


class Network:
    """A stack of dense layers built from a NetworkConfig.

    Parameters live in ``weights`` (list of (fan_in, fan_out) matrices),
    ``biases`` (list of (1, fan_out) rows) and ``act_params`` (one float per
    hidden layer; present for every kind, but only trainable kinds receive
    nonzero gradients).
    """

    def __init__(self, config: NetworkConfig, rng: RandomStream):
        self.config = config
        self.weights: list[Matrix] = []
        self.biases: list[Matrix] = []
        fan_in = config.input_dim
        for fan_out in config.layer_widths:
            limit = math.sqrt(6.0 / (fan_in + fan_out))
            self.weights.append(rng.uniform(-limit, limit, fan_in, fan_out))
            self.biases.append(np.zeros((1, fan_out)))
            fan_in = fan_out
        self.act_params: list[float] = [
            config.activation.initial_param for _ in range(config.num_hidden)
        ]
        self._version = 0

    @property
    def version(self) -> int:
        """Bumped on every sgd_step; used to reject stale forward caches."""
        return self._version

    def forward(
        self,
        x: Matrix,
        train: bool = False,
        rng: RandomStream | None = None,
    ) -> tuple[Matrix, ForwardCache | None]:
        """Run the network on a batch.

        In eval mode (the default) dropout is skipped and no cache is
        returned. In train mode hidden activations are masked and rescaled
        by 1/keep_prob (rng required whenever dropout_rate > 0), and the
        returned cache feeds backward().
        """
        x = as_matrix(x)
        if x.shape[1] != self.config.input_dim:
            raise ValueError(
                f"input has {x.shape[1]} features, network expects {self.config.input_dim}"
            )
        cfg = self.config
        kind = cfg.activation.kind
        use_dropout = train and cfg.dropout_rate > 0.0
        keep = 1.0 - cfg.dropout_rate
        if use_dropout and rng is None:
            raise ValueError("training forward with dropout requires a RandomStream")

        inputs = [x]
        pre_acts: list[Matrix] = []
        masks: list[Matrix | None] = []
        a = x
        for i in range(cfg.num_hidden):
            z = a @ self.weights[i] + self.biases[i]
            pre_acts.append(z)
            a = activations.forward(kind, z, self.act_params[i])
            if use_dropout:
                mask = rng.bernoulli_mask(keep, a.shape[0], a.shape[1])
                a = a * mask / keep
                masks.append(mask)
            else:
                masks.append(None)
            inputs.append(a)
        logits = a @ self.weights[-1] + self.biases[-1]
        if not np.isfinite(logits).all():
            raise ValueError("forward pass produced non-finite logits")
        if not train:
            return logits, None
        cache = ForwardCache(
            inputs=inputs,
            pre_acts=pre_acts,
            masks=masks,
            logits=logits,
            keep_prob=keep,
            version=self._version,
        )
        return logits, cache

    def backward(self, cache: ForwardCache, probs: Matrix, labels: np.ndarray) -> Gradients:
        """Gradients of the mean cross-entropy loss for the cached batch."""
        probs = as_matrix(probs)
        labels = np.asarray(labels)
        n = cache.batch_size
        if probs.shape[0] != n or labels.shape[0] != n:
            raise ValueError(
                f"batch mismatch: cache has {n} rows, probs {probs.shape[0]}, "
                f"labels {labels.shape[0]}"
            )
        dlogits = probs.copy()
        dlogits[np.arange(n), labels] -= 1.0
        dlogits /= n
        return self.backward_from_output_grad(cache, dlogits)

    def backward_from_output_grad(self, cache: ForwardCache, dlogits: Matrix) -> Gradients:
        """Backprop an arbitrary gradient of the loss wrt the logits.

        Used directly by the squared-error fitting demo; backward() wraps it
        for the classification head.
        """
        if cache.version != self._version:
            raise RuntimeError(
                "stale forward cache: parameters changed since this forward pass"
            )
        cfg = self.config
        kind = cfg.activation.kind
        trainable = cfg.activation.trainable
        n_layers = cfg.num_layers
        d_weights: list[Matrix] = [None] * n_layers
        d_biases: list[Matrix] = [None] * n_layers
        d_act: list[float] = [0.0] * cfg.num_hidden

        grad = as_matrix(dlogits)
        for layer in range(n_layers - 1, -1, -1):
            d_weights[layer] = cache.inputs[layer].T @ grad
            d_biases[layer] = grad.sum(axis=0, keepdims=True)
            if layer == 0:
                break
            upstream = grad @ self.weights[layer].T
            h = layer - 1
            if cache.masks[h] is not None:
                upstream = upstream * cache.masks[h] / cache.keep_prob
            z = cache.pre_acts[h]
            p = self.act_params[h]
            if trainable:
                d_act[h] = float((upstream * activations.deriv_param(kind, z, p)).sum())
            grad = upstream * activations.deriv_input(kind, z, p)
        return Gradients(weights=d_weights, biases=d_biases, act_params=d_act)

    def sgd_step(self, grads: Gradients, learning_rate: float) -> None:
        """In-place p <- p - lr * g for every parameter."""
        if learning_rate < 0:
            raise ValueError(f"learning_rate must be >= 0, got {learning_rate}")
        for w, g in zip(self.weights, grads.weights):
            w -= learning_rate * g
        for b, g in zip(self.biases, grads.biases):
            b -= learning_rate * g
        if self.config.activation.trainable:
            for i, g in enumerate(grads.act_params):
                self.act_params[i] -= learning_rate * g
        self._version += 1


def train_epoch(net: Network, dataset: Dataset, cfg: TrainConfig, rng: RandomStream) -> float:
    """One pass over the dataset in shuffled minibatches; returns the mean
    training loss over all examples (final partial batch included)."""
    n = len(dataset)
    if n == 0:
        raise ValueError("cannot train on an empty dataset")
    total = 0.0
    for xb, yb in batches(dataset, cfg.batch_size, rng):
        logits, cache = net.forward(xb, train=True, rng=rng)
        loss, probs = softmax_cross_entropy(logits, yb)
        grads = net.backward(cache, probs, yb)
        net.sgd_step(grads, cfg.learning_rate)
        total += loss * xb.shape[0]
    return total / n


def evaluate(net: Network, dataset: Dataset) -> float:
    """Classification accuracy in [0, 1], computed in eval mode (no dropout,
    no parameter changes). Ties in the logits resolve to the lowest index."""
    n = len(dataset)
    if n == 0:
        raise ValueError("cannot evaluate on an empty dataset")
    correct = 0
    for start in range(0, n, _EVAL_CHUNK):
        xb = dataset.features[start : start + _EVAL_CHUNK]
        yb = dataset.labels[start : start + _EVAL_CHUNK]
        logits, _ = net.forward(xb)
        correct += int((np.argmax(logits, axis=1) == yb).sum())
    return correct / n


@dataclass
class TrainResult:
    network: Network
    losses: list[float] = field(default_factory=list)
    accuracy: float = 0.0


def train_model(
    net_config: NetworkConfig,
    dataset: Dataset,
    train_config: TrainConfig,
    eval_dataset: Dataset | None = None,
    progress=None,
) -> TrainResult:
    """Initialize and train a network end to end.

    All randomness (init, shuffling, dropout) flows from train_config.seed.
    The reported accuracy uses eval_dataset when given, else the training
    set. ``progress`` is an optional callback (epoch, loss) for logging.
    """
    rng = RandomStream(train_config.seed)
    net = Network(net_config, rng)
    result = TrainResult(network=net)
    for epoch in range(train_config.epochs):
        loss = train_epoch(net, dataset, train_config, rng)
        result.losses.append(loss)
        if progress is not None:
            progress(epoch, loss)
    result.accuracy = evaluate(net, eval_dataset if eval_dataset is not None else dataset)
    return result

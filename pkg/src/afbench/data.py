"""Datasets: IDX binary loading, synthetic Gaussian blobs, batching, splits.

Features are always float64 in [0, 1]; labels are int64 class ids in
[0, num_classes). Dataset arrays are frozen (numpy writeable=False) so a
training loop cannot mutate its inputs by accident.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .numerics import RandomStream

IMAGES_MAGIC = 0x00000803
LABELS_MAGIC = 0x00000801


class IdxFormatError(ValueError):
    """Raised when an IDX file does not match the expected binary layout."""


@dataclass(frozen=True)
class Dataset:
    """Immutable feature matrix plus integer labels."""

    features: np.ndarray
    labels: np.ndarray
    num_classes: int

    def __post_init__(self):
        feats = np.ascontiguousarray(self.features, dtype=np.float64)
        labs = np.ascontiguousarray(self.labels, dtype=np.int64)
        if feats.ndim != 2:
            raise ValueError(f"features must be 2-D, got shape {feats.shape}")
        if labs.ndim != 1 or labs.shape[0] != feats.shape[0]:
            raise ValueError(
                f"labels shape {labs.shape} does not match {feats.shape[0]} examples"
            )
        if self.num_classes < 1:
            raise ValueError(f"num_classes must be >= 1, got {self.num_classes}")
        if feats.size and (feats.min() < 0.0 or feats.max() > 1.0):
            raise ValueError("features must lie in [0, 1]")
        if labs.size and (labs.min() < 0 or labs.max() >= self.num_classes):
            raise ValueError(f"labels must lie in [0, {self.num_classes - 1}]")
        feats.setflags(write=False)
        labs.setflags(write=False)
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "labels", labs)

    def __len__(self) -> int:
        return self.features.shape[0]

    @property
    def num_features(self) -> int:
        return self.features.shape[1]


def _read_file(path) -> bytes:
    with open(path, "rb") as f:
        return f.read()


def load_idx(images_path, labels_path) -> Dataset:
    """Load an image/label pair of IDX files into a Dataset.

    Images: big-endian magic 0x00000803, then counts [n, rows, cols], then
    n*rows*cols unsigned bytes; pixels are scaled to [0, 1] by dividing by
    255. Labels: magic 0x00000801, count n, then n unsigned bytes. Any
    layout violation raises IdxFormatError naming the offending bytes.
    """
    img = _read_file(images_path)
    if len(img) < 16:
        raise IdxFormatError(f"{images_path}: truncated header ({len(img)} bytes)")
    magic = img[0:4]
    if int.from_bytes(magic, "big") != IMAGES_MAGIC:
        raise IdxFormatError(
            f"{images_path}: bad magic bytes 0x{magic.hex()} (expected 0x00000803)"
        )
    n, rows, cols = struct.unpack(">III", img[4:16])
    expected = 16 + n * rows * cols
    if len(img) != expected:
        raise IdxFormatError(
            f"{images_path}: {len(img)} bytes on disk, header implies {expected}"
        )
    pixels = np.frombuffer(img, dtype=np.uint8, offset=16)
    features = pixels.astype(np.float64).reshape(n, rows * cols) / 255.0

    lab = _read_file(labels_path)
    if len(lab) < 8:
        raise IdxFormatError(f"{labels_path}: truncated header ({len(lab)} bytes)")
    magic = lab[0:4]
    if int.from_bytes(magic, "big") != LABELS_MAGIC:
        raise IdxFormatError(
            f"{labels_path}: bad magic bytes 0x{magic.hex()} (expected 0x00000801)"
        )
    (count,) = struct.unpack(">I", lab[4:8])
    if count != n:
        raise IdxFormatError(
            f"{labels_path}: {count} labels for {n} images"
        )
    if len(lab) != 8 + count:
        raise IdxFormatError(
            f"{labels_path}: {len(lab)} bytes on disk, header implies {8 + count}"
        )
    labels = np.frombuffer(lab, dtype=np.uint8, offset=8).astype(np.int64)
    num_classes = int(labels.max()) + 1 if count else 1
    return Dataset(features=features, labels=labels, num_classes=num_classes)


def synth_blobs(
    n: int, d: int, num_classes: int, spread: float, rng: RandomStream
) -> Dataset:
    """Gaussian class blobs with centers drawn uniformly in the unit cube.

    Class sizes are as balanced as n allows (the first n mod num_classes
    classes get one extra example). Features are clipped to [0, 1].
    """
    if num_classes < 1:
        raise ValueError(f"num_classes must be >= 1, got {num_classes}")
    if n < num_classes:
        raise ValueError(f"need at least one example per class: n={n}, classes={num_classes}")
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    if spread <= 0:
        raise ValueError(f"spread must be > 0, got {spread}")
    centers = rng.uniform(0.0, 1.0, num_classes, d)
    base, extra = divmod(n, num_classes)
    feats = []
    labs = []
    for c in range(num_classes):
        count = base + (1 if c < extra else 0)
        noise = rng.normal(0.0, spread, count, d)
        feats.append(np.clip(centers[c] + noise, 0.0, 1.0))
        labs.append(np.full(count, c, dtype=np.int64))
    return Dataset(
        features=np.concatenate(feats, axis=0),
        labels=np.concatenate(labs),
        num_classes=num_classes,
    )


def batches(dataset: Dataset, batch_size: int, rng: RandomStream):
    """Shuffled minibatch views of the dataset, final partial batch kept.

    One permutation is drawn per call; the (features, labels) pairs are
    views into the permuted copy, never the dataset's own arrays.
    """
    if batch_size < 1:
        raise ValueError(f"batch_size must be >= 1, got {batch_size}")
    n = len(dataset)
    order = rng.permutation(n)
    feats = dataset.features[order]
    labs = dataset.labels[order]
    return [
        (feats[start : start + batch_size], labs[start : start + batch_size])
        for start in range(0, n, batch_size)
    ]


def split_dataset(
    dataset: Dataset, eval_fraction: float, rng: RandomStream
) -> tuple[Dataset, Dataset]:
    """Random disjoint (train, eval) split; eval gets round(n * fraction)."""
    if not 0.0 < eval_fraction < 1.0:
        raise ValueError(f"eval_fraction must be in (0, 1), got {eval_fraction}")
    n = len(dataset)
    n_eval = int(round(n * eval_fraction))
    if n_eval == 0 or n_eval == n:
        raise ValueError(
            f"eval_fraction {eval_fraction} leaves an empty side for {n} examples"
        )
    order = rng.permutation(n)
    eval_idx = order[:n_eval]
    train_idx = order[n_eval:]
    make = lambda idx: Dataset(
        features=dataset.features[idx].copy(),
        labels=dataset.labels[idx].copy(),
        num_classes=dataset.num_classes,
    )
    return make(train_idx), make(eval_idx)


def dataset_from_json(obj: dict, rng_seed_default: int = 0) -> Dataset:
    """Build a dataset from its JSON description.

    {"kind": "blobs", "n": ..., "d": ..., "classes": ..., "spread": ...,
     "seed": ...} or {"kind": "idx", "images": path, "labels": path}.
    """
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ValueError("dataset config must be an object with a 'kind' field")
    kind = obj["kind"]
    if kind == "blobs":
        for key in ("n", "d", "classes", "spread"):
            if key not in obj:
                raise ValueError(f"blobs dataset config missing field {key!r}")
        rng = RandomStream(int(obj.get("seed", rng_seed_default)))
        return synth_blobs(
            int(obj["n"]), int(obj["d"]), int(obj["classes"]), float(obj["spread"]), rng
        )
    if kind == "idx":
        for key in ("images", "labels"):
            if key not in obj:
                raise ValueError(f"idx dataset config missing field {key!r}")
        return load_idx(obj["images"], obj["labels"])
    raise ValueError(f"unknown dataset kind {kind!r}; expected 'blobs' or 'idx'")

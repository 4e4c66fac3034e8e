"""Dense float64 matrix helpers and seedable random streams.

All heavy lifting is delegated to numpy. A "matrix" throughout this package
is a 2-D float64 ndarray; the helpers here add the shape and finiteness
checks that the network code relies on, so failures surface close to the
bad operand instead of several layers later.

Randomness comes from :class:`RandomStream`, a thin wrapper around numpy's
``Generator`` seeded with PCG64. Identical seeds give bit-identical draws,
which is what makes whole benchmark runs reproducible. Independent seeds
for related streams are derived with :func:`derive_seed`, a SHA-256 hash of
the identifying labels, so adding a new activation or config to a matrix
never shifts the seeds of existing trials.
"""

from __future__ import annotations

import hashlib
from collections.abc import Callable, Iterable

import numpy as np

Matrix = np.ndarray

_REDUCE_OPS = ("sum", "mean", "max", "argmax")


def as_matrix(values: Iterable, copy: bool = False) -> Matrix:
    """Coerce nested sequences or an ndarray to a 2-D float64 matrix."""
    arr = np.array(values, dtype=np.float64, copy=copy) if copy else np.asarray(values, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got array of shape {arr.shape}")
    return arr


def matmul(a: Matrix, b: Matrix) -> Matrix:
    """Matrix product with explicit shape diagnostics.

    Raises ValueError if the inner dimensions disagree (the message names
    both shapes) or if the result contains NaN/inf, which would otherwise
    propagate silently through a training step.
    """
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"matmul shape mismatch: {a.shape} x {b.shape}")
    with np.errstate(over="ignore", invalid="ignore"):
        out = a @ b
    if not np.isfinite(out).all():
        raise ValueError("matmul produced non-finite values")
    return out


def elementwise_map(a: Matrix, fn: Callable[[float], float]) -> Matrix:
    """Apply a scalar function to every entry, preserving shape."""
    a = as_matrix(a)
    out = np.empty_like(a)
    flat_in = a.ravel()
    flat_out = out.ravel()
    for i in range(flat_in.size):
        flat_out[i] = fn(flat_in[i])
    return out


def reduce(a: Matrix, op: str, axis: int) -> np.ndarray:
    """Collapse one axis of a matrix.

    op is one of "sum", "mean", "max", "argmax"; axis 0 collapses rows
    (one result per column), axis 1 collapses columns (one result per row).
    argmax resolves ties toward the lowest index, matching numpy.
    """
    a = as_matrix(a)
    if op not in _REDUCE_OPS:
        raise ValueError(f"unknown reduce op {op!r}; expected one of {_REDUCE_OPS}")
    if axis not in (0, 1):
        raise ValueError(f"axis must be 0 or 1, got {axis!r}")
    if op == "argmax":
        return np.argmax(a, axis=axis)
    return getattr(np, op)(a, axis=axis)


def derive_seed(*parts) -> int:
    """Deterministic 64-bit seed from a sequence of identifying labels.

    The labels are stringified, joined, and hashed with SHA-256; the first
    eight bytes of the digest become the seed. Distinct label tuples give
    (for all practical purposes) distinct, uncorrelated seeds.
    """
    text = "\x1f".join(str(p) for p in parts)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


class RandomStream:
    """Seeded source of random matrices (numpy PCG64 underneath)."""

    def __init__(self, seed: int):
        self.seed = int(seed)
        self._gen = np.random.Generator(np.random.PCG64(self.seed))

    def __repr__(self) -> str:
        return f"RandomStream(seed={self.seed})"

    def uniform(self, low: float, high: float, rows: int, cols: int) -> Matrix:
        """Matrix of draws from U[low, high). low == high is allowed and
        yields a constant matrix; low > high is an error."""
        if low > high:
            raise ValueError(f"uniform bounds reversed: low={low} > high={high}")
        if low == high:
            return np.full((rows, cols), float(low))
        return self._gen.uniform(low, high, size=(rows, cols))

    def normal(self, mean: float, std: float, rows: int, cols: int) -> Matrix:
        """Matrix of draws from N(mean, std^2). std == 0 yields a constant
        matrix of the mean."""
        if std < 0:
            raise ValueError(f"normal std must be >= 0, got {std}")
        if std == 0:
            return np.full((rows, cols), float(mean))
        return self._gen.normal(mean, std, size=(rows, cols))

    def bernoulli_mask(self, keep_prob: float, rows: int, cols: int) -> Matrix:
        """0/1 matrix where each entry is 1 with probability keep_prob."""
        if not 0.0 <= keep_prob <= 1.0:
            raise ValueError(f"keep_prob must be in [0, 1], got {keep_prob}")
        return (self._gen.random(size=(rows, cols)) < keep_prob).astype(np.float64)

    def permutation(self, n: int) -> np.ndarray:
        """Random permutation of range(n)."""
        if n < 0:
            raise ValueError(f"permutation length must be >= 0, got {n}")
        return self._gen.permutation(n)

    def child(self, *labels) -> "RandomStream":
        """Independent stream whose seed is derived from this stream's seed
        plus the given labels. Does not consume from this stream."""
        return RandomStream(derive_seed(self.seed, *labels))

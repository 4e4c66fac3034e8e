"""The ten activation functions: values, input derivatives, parameter derivatives.

Every function is identified by a lowercase string key:

    relu      max(x, 0)
    swish     x * sigmoid(x)
    tanh      tanh(x)
    lrelu     x if x >= 0 else 0.01 * x
    prelu     x if x >= 0 else a * x          (a trainable, starts at 0.25)
    softplus  ln(1 + exp(x))
    elu       x if x >= 0 else exp(x) - 1
    frelu     x + b if x >= 0 else b          (b trainable, starts at -0.398)
    fts       x * sigmoid(x) + t if x >= 0 else t   (t fixed at -0.20)
    pfts      same shape as fts but t is trainable  (starts at -0.20)

Piecewise kinds use the x >= 0 branch at the breakpoint, so the derivative
at exactly 0 is the upper-branch derivative (relu'(0) == 1, frelu'(0) == 1).

Three kinds carry a single trainable scalar (prelu, frelu, pfts). The
``param`` argument of :func:`forward` / :func:`deriv_input` /
:func:`deriv_param` supplies the current value of that scalar; the other
seven kinds accept and ignore it, which keeps generic finite-difference
checks uniform (perturbing the parameter of a fixed kind changes nothing,
matching the analytic parameter derivative of zero).

All functions are vectorized: scalars in give floats out, arrays in give
float64 arrays of the same shape. Implementations avoid overflow for large
|x| (sigmoid and softplus are computed from exp(-|x|), the elu negative
branch goes through expm1 on a clipped argument).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

KINDS = (
    "relu",
    "swish",
    "tanh",
    "lrelu",
    "prelu",
    "softplus",
    "elu",
    "frelu",
    "fts",
    "pfts",
)

TRAINABLE_KINDS = frozenset(("prelu", "frelu", "pfts"))

#: Kinds whose definition switches branches at x == 0.
PIECEWISE_KINDS = frozenset(("relu", "lrelu", "prelu", "elu", "frelu", "fts", "pfts"))

LRELU_SLOPE = 0.01
ELU_ALPHA = 1.0
FTS_SHIFT = -0.20

_INIT_PARAM = {
    "relu": 0.0,
    "swish": 1.0,
    "tanh": 0.0,
    "lrelu": LRELU_SLOPE,
    "prelu": 0.25,
    "softplus": 0.0,
    "elu": ELU_ALPHA,
    "frelu": -0.398,
    "fts": FTS_SHIFT,
    "pfts": FTS_SHIFT,
}


def _check_kind(kind: str) -> None:
    if kind not in KINDS:
        raise ValueError(f"unknown activation kind {kind!r}; expected one of {KINDS}")


def is_trainable(kind: str) -> bool:
    _check_kind(kind)
    return kind in TRAINABLE_KINDS


def init_param(kind: str) -> float:
    """Default value of the kind's scalar parameter (its fixed constant for
    non-trainable kinds, the training start point for trainable ones)."""
    _check_kind(kind)
    return _INIT_PARAM[kind]


def _sigmoid(x: np.ndarray) -> np.ndarray:
    # exp(-|x|) never overflows; the two branches reassemble 1/(1+exp(-x)).
    z = np.exp(-np.abs(x))
    return np.where(x >= 0, 1.0 / (1.0 + z), z / (1.0 + z))


def _prepare(kind: str, x, param: float | None) -> tuple[np.ndarray, float, bool]:
    _check_kind(kind)
    arr = np.asarray(x, dtype=np.float64)
    if np.isnan(arr).any():
        raise ValueError(f"activation input contains NaN ({kind})")
    p = _INIT_PARAM[kind] if param is None else float(param)
    return arr, p, arr.ndim == 0


def _out(value: np.ndarray, scalar: bool):
    return float(value) if scalar else value


def forward(kind: str, x, param: float | None = None):
    """Evaluate the activation at x.

    param is the trainable scalar for prelu/frelu/pfts (defaults to the
    kind's initial value); fixed kinds ignore it.
    """
    x, p, scalar = _prepare(kind, x, param)
    if kind == "relu":
        out = np.where(x >= 0, x, 0.0)
    elif kind == "swish":
        out = x * _sigmoid(x)
    elif kind == "tanh":
        out = np.tanh(x)
    elif kind == "lrelu":
        out = np.where(x >= 0, x, LRELU_SLOPE * x)
    elif kind == "prelu":
        out = np.where(x >= 0, x, p * x)
    elif kind == "softplus":
        out = np.maximum(x, 0.0) + np.log1p(np.exp(-np.abs(x)))
    elif kind == "elu":
        out = np.where(x >= 0, x, ELU_ALPHA * np.expm1(np.minimum(x, 0.0)))
    elif kind == "frelu":
        out = np.where(x >= 0, x + p, p)
    elif kind == "fts":
        out = np.where(x >= 0, x * _sigmoid(x) + FTS_SHIFT, FTS_SHIFT)
    else:  # pfts
        out = np.where(x >= 0, x * _sigmoid(x) + p, p)
    return _out(out, scalar)


def deriv_input(kind: str, x, param: float | None = None):
    """d(activation)/dx at x (upper-branch value at the breakpoint)."""
    x, p, scalar = _prepare(kind, x, param)
    if kind == "relu":
        out = np.where(x >= 0, 1.0, 0.0)
    elif kind == "swish":
        s = _sigmoid(x)
        out = s * (1.0 + x * (1.0 - s))
    elif kind == "tanh":
        t = np.tanh(x)
        out = 1.0 - t * t
    elif kind == "lrelu":
        out = np.where(x >= 0, 1.0, LRELU_SLOPE)
    elif kind == "prelu":
        out = np.where(x >= 0, 1.0, p)
    elif kind == "softplus":
        out = _sigmoid(x)
    elif kind == "elu":
        out = np.where(x >= 0, 1.0, ELU_ALPHA * np.exp(np.minimum(x, 0.0)))
    elif kind == "frelu":
        out = np.where(x >= 0, 1.0, 0.0)
    else:  # fts, pfts: the shift does not affect the slope
        s = _sigmoid(x)
        out = np.where(x >= 0, s * (1.0 + x * (1.0 - s)), 0.0)
    return _out(out, scalar)


def deriv_param(kind: str, x, param: float | None = None):
    """d(activation)/d(param) at x; identically zero for fixed kinds."""
    x, p, scalar = _prepare(kind, x, param)
    if kind == "prelu":
        out = np.where(x >= 0, 0.0, x)
    elif kind in ("frelu", "pfts"):
        out = np.ones_like(x)
    else:
        out = np.zeros_like(x)
    return _out(out, scalar)


@dataclass(frozen=True)
class ActivationSpec:
    """An activation kind plus an optional starting value for its scalar.

    ``init`` may only be given for trainable kinds; None means "use the
    default from the table above".
    """

    kind: str
    init: float | None = None

    def __post_init__(self):
        _check_kind(self.kind)
        if self.init is not None and self.kind not in TRAINABLE_KINDS:
            raise ValueError(
                f"activation {self.kind!r} has no trainable parameter; "
                "remove the init override"
            )

    @property
    def trainable(self) -> bool:
        return self.kind in TRAINABLE_KINDS

    @property
    def initial_param(self) -> float:
        return _INIT_PARAM[self.kind] if self.init is None else float(self.init)

    def to_json(self) -> dict:
        obj = {"kind": self.kind}
        if self.init is not None:
            obj["init"] = self.init
        return obj

    @classmethod
    def from_json(cls, obj: dict) -> "ActivationSpec":
        if not isinstance(obj, dict) or "kind" not in obj:
            raise ValueError("activation spec must be an object with a 'kind' field")
        init = obj.get("init")
        return cls(kind=obj["kind"], init=None if init is None else float(init))

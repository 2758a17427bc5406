"""Weighted sequence spaces, sparse coefficient vectors and their norms.

A :class:`WeightedLpSpace` is ``l^p_w`` on indices ``1, 2, ...`` with norm
``(sum_k |c_k|^p w_k)^(1/p)``.  Coefficients of a :class:`SeqVector` are always
read with respect to the space's basis: the canonical unit vectors
(``basis="canonical"``) or the rescaled ones ``w_k^(-1/p) delta_k``
(``basis="scaled"``), for which the norm reduces to the plain ``l^p`` norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Mapping

import numpy as np

from . import _scaling
from .exceptions import (
    InvalidIndexError,
    InvalidInputError,
    UnsupportedWeightError,
)

WEIGHT_KINDS = ("constant", "geometric", "power", "table", "gaussian")
BASIS_MODES = ("canonical", "scaled")


@dataclass(frozen=True)
class WeightSequence:
    """Positive weights ``w_k``, ``k >= 1``, of a closed-form kind.

    Kinds
    -----
    constant   ``w_k = scale``
    geometric  ``w_k = scale * ratio**k``
    power      ``w_k = scale * k**exponent``
    table      explicit ``prefix`` for ``k = 1..m``, then ``tail`` for ``k > m``
    gaussian   ``w_k = exp(gamma * k**2)``; exists to exercise unbounded shifts
    """

    kind: str
    scale: float = 1.0
    ratio: float = 1.0
    exponent: float = 0.0
    prefix: tuple = ()
    tail: float = 1.0
    gamma: float = 0.0

    def __post_init__(self):
        if self.kind not in WEIGHT_KINDS:
            raise InvalidInputError(f"unknown weight kind {self.kind!r}")
        object.__setattr__(self, "prefix", tuple(float(t) for t in self.prefix))
        numbers = (self.scale, self.ratio, self.exponent, self.tail, self.gamma) + self.prefix
        if not all(math.isfinite(x) for x in numbers):
            raise InvalidInputError("weight parameters must be finite")
        if self.scale <= 0 or self.ratio <= 0 or self.tail <= 0:
            raise InvalidInputError("weights must be positive")
        if any(t <= 0 for t in self.prefix):
            raise InvalidInputError("table prefix entries must be positive")

    # -- constructors -----------------------------------------------------
    @classmethod
    def constant(cls, value=1.0):
        return cls("constant", scale=float(value))

    @classmethod
    def geometric(cls, ratio, scale=1.0):
        return cls("geometric", scale=float(scale), ratio=float(ratio))

    @classmethod
    def power(cls, exponent, scale=1.0):
        return cls("power", scale=float(scale), exponent=float(exponent))

    @classmethod
    def table(cls, prefix, tail):
        return cls("table", prefix=tuple(prefix), tail=float(tail))

    @classmethod
    def gaussian(cls, gamma):
        return cls("gaussian", gamma=float(gamma))

    # -- evaluation -------------------------------------------------------
    def log_values(self, k):
        """``log w_k`` for an integer array ``k >= 1`` (no overflow)."""
        k = np.asarray(k, dtype=float)
        if self.kind == "constant":
            return np.full(k.shape, math.log(self.scale))
        if self.kind == "geometric":
            return math.log(self.scale) + k * math.log(self.ratio)
        if self.kind == "power":
            return math.log(self.scale) + self.exponent * np.log(k)
        if self.kind == "gaussian":
            return self.gamma * k * k
        table = np.log(np.asarray(self.prefix + (self.tail,)))
        idx = np.minimum(k.astype(int), len(self.prefix) + 1) - 1
        return table[idx]

    def __call__(self, k):
        kk = np.asarray(k, dtype=float)
        with np.errstate(over="ignore"):
            if self.kind == "constant":
                values = np.full(kk.shape, self.scale)
            elif self.kind == "geometric":
                values = self.scale * self.ratio ** kk
            elif self.kind == "power":
                values = self.scale * kk ** self.exponent
            elif self.kind == "table":
                table = np.asarray(self.prefix + (self.tail,))
                values = table[np.minimum(kk.astype(int), len(self.prefix) + 1) - 1]
            else:
                values = np.exp(self.gamma * kk * kk)
        return float(values) if np.ndim(k) == 0 else values

    def ratio_sups(self):
        """``(sup_{k>=2} w_{k-1}/w_k, sup_{k>=2} w_k/w_{k-1})``, possibly ``inf``.

        Evaluated analytically per kind; never by truncating the sequence.
        """
        if self.kind == "constant":
            return 1.0, 1.0
        if self.kind == "geometric":
            return 1.0 / self.ratio, self.ratio
        if self.kind == "power":
            # ((k-1)/k)^s is monotone in k: the extreme is at k=2 or the limit 1
            s = self.exponent
            return max(1.0, 2.0 ** (-s)), max(1.0, 2.0 ** s)
        if self.kind == "gaussian":
            g = self.gamma
            if g > 0:
                return math.exp(-3.0 * g), math.inf
            if g < 0:
                return math.inf, math.exp(3.0 * g)
            return 1.0, 1.0
        values = self.prefix + (self.tail,)
        down = [values[i - 1] / values[i] for i in range(1, len(values))]
        # the constant tail contributes ratio 1 infinitely often
        return max(down + [1.0]), max([1.0 / r for r in down] + [1.0])

    def log_shifted_series(self, x, start=1):
        """``log sum_{i>=0} x**i * w_{start+i}`` in closed form.

        Raises :class:`UnsupportedWeightError` when the series diverges or the
        kind has no closed form.
        """
        if start < 1:
            raise InvalidIndexError(f"series start must be >= 1, got {start}")
        if not 0 <= x < 1:
            raise UnsupportedWeightError(f"series ratio {x} outside [0, 1)")
        if self.kind == "constant":
            return math.log(self.scale) - math.log1p(-x)
        if self.kind == "geometric":
            rx = self.ratio * x
            if rx >= 1:
                raise UnsupportedWeightError(
                    f"sum of x^k w_k diverges: ratio*x = {rx} >= 1")
            return float(self.log_values(start)) - math.log1p(-rx)
        if self.kind == "power":
            import mpmath

            # Lerch transcendent: sum_i x^i (start+i)^s
            value = mpmath.lerchphi(x, -self.exponent, start)
            return math.log(self.scale) + float(mpmath.log(value))
        if self.kind == "table":
            m = len(self.prefix)
            total = 0.0
            for i, k in enumerate(range(start, m + 1)):
                total += x ** i * self.prefix[k - 1]
            first_tail = max(start, m + 1) - start
            return math.log(total + self.tail * x ** first_tail / (1.0 - x))
        if self.gamma > 0:
            raise UnsupportedWeightError("gaussian weight with gamma > 0: series diverges")
        raise UnsupportedWeightError("gaussian weight has no closed-form series")

    def shifted_series(self, x, start=1):
        """``sum_{i>=0} x**i * w_{start+i}``."""
        return math.exp(self.log_shifted_series(x, start))

    def power_series(self, x, start=1):
        """``sum_{k>=start} x**k * w_k``."""
        if x == 0:
            return 0.0
        return x ** start * self.shifted_series(x, start)

    # -- serialization ----------------------------------------------------
    def to_dict(self):
        if self.kind == "constant":
            return {"kind": "constant", "value": self.scale}
        if self.kind == "geometric":
            return {"kind": "geometric", "ratio": self.ratio, "scale": self.scale}
        if self.kind == "power":
            return {"kind": "power", "exponent": self.exponent, "scale": self.scale}
        if self.kind == "table":
            return {"kind": "table", "prefix": list(self.prefix), "tail": self.tail}
        return {"kind": "gaussian", "gamma": self.gamma}

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        kind = data.pop("kind", None)
        try:
            if kind == "constant":
                return cls.constant(data.get("value", 1.0))
            if kind == "geometric":
                return cls.geometric(data["ratio"], data.get("scale", 1.0))
            if kind == "power":
                return cls.power(data["exponent"], data.get("scale", 1.0))
            if kind == "table":
                return cls.table(data["prefix"], data["tail"])
            if kind == "gaussian":
                return cls.gaussian(data["gamma"])
        except KeyError as exc:
            raise InvalidInputError(f"weight kind {kind!r} needs field {exc}") from None
        raise InvalidInputError(f"unknown weight kind {kind!r}")


@dataclass(frozen=True)
class WeightedLpSpace:
    """The space ``l^p_w`` together with the basis the shifts act on."""

    p: float = 2.0
    weights: WeightSequence = field(default_factory=WeightSequence.constant)
    basis: str = "canonical"

    def __post_init__(self):
        if not (math.isfinite(self.p) and self.p >= 1):
            raise InvalidInputError(f"exponent p must satisfy 1 <= p < inf, got {self.p}")
        if self.basis not in BASIS_MODES:
            raise InvalidInputError(f"basis must be one of {BASIS_MODES}, got {self.basis!r}")
        object.__setattr__(self, "p", float(self.p))

    @property
    def coefficient_weights(self):
        """Weights seen by the coefficients (``1`` in scaled mode)."""
        if self.basis == "scaled":
            return WeightSequence.constant(1.0)
        return self.weights

    def to_dict(self):
        return {"p": self.p, "weight": self.weights.to_dict(), "basis": self.basis}

    @classmethod
    def from_dict(cls, data):
        weight = WeightSequence.from_dict(data.get("weight", {"kind": "constant"}))
        return cls(p=float(data.get("p", 2.0)), weights=weight,
                   basis=data.get("basis", "canonical"))


@dataclass(frozen=True)
class DecayProfile:
    """Envelope ``|c_j| <= C * exp(-beta * |j - center|)``."""

    C: float
    beta: float
    center: int = 1

    def __post_init__(self):
        if not (self.C > 0 and math.isfinite(self.C)):
            raise InvalidInputError(f"decay constant C must be positive, got {self.C}")
        if not (self.beta > 0 and math.isfinite(self.beta)):
            raise InvalidInputError(f"decay rate beta must be positive, got {self.beta}")
        if int(self.center) != self.center or self.center < 1:
            raise InvalidInputError(f"decay center must be an integer >= 1, got {self.center}")
        object.__setattr__(self, "center", int(self.center))

    def envelope(self, j):
        j = np.asarray(j, dtype=float)
        return self.C * np.exp(-self.beta * np.abs(j - self.center))

    def log_envelope(self, j):
        j = np.asarray(j, dtype=float)
        return math.log(self.C) - self.beta * np.abs(j - self.center)

    def shifted(self, offset):
        """Envelope of the sequence re-indexed by ``j -> j + offset``.

        A center pushed below 1 is folded back to 1; for ``j >= 1`` the
        envelope is then a pure decreasing exponential, so this is exact.
        """
        center = self.center + offset
        if center >= 1:
            return replace(self, center=center)
        log_c = math.log(self.C) - self.beta * (1 - center)
        if log_c < math.log(np.finfo(float).tiny):
            return None
        return DecayProfile(math.exp(log_c), self.beta, 1)


def _scaled_scalar(value, base, exponent):
    scaled = _scaling.apply_factor(value, base, exponent)
    return complex(scaled) if isinstance(value, complex) else float(scaled)


def _clean_coefficients(coefficients):
    out = {}
    for index, value in dict(coefficients).items():
        if int(index) != index or index < 1:
            raise InvalidIndexError(f"basis indices start at 1, got {index}")
        if isinstance(value, complex) or np.iscomplexobj(value):
            value = complex(value)
            if value.imag == 0:
                value = value.real
        else:
            value = float(value)
        if not np.isfinite(value):
            raise InvalidInputError(f"non-finite coefficient at index {index}")
        if value != 0:
            out[int(index)] = value
    return dict(sorted(out.items()))


@dataclass(frozen=True, eq=False)
class SeqVector:
    """Sparse coefficient vector over basis indices ``1, 2, ...``.

    The represented sequence is ``scale_base**scale_exponent`` times the
    stored ``coefficients``.  With ``tail_start`` set, every index
    ``j >= tail_start`` additionally carries the envelope value of ``decay``
    exactly (an explicit geometric tail); otherwise ``decay`` only certifies
    the stored entries.
    """

    coefficients: Mapping[int, float] = field(default_factory=dict)
    decay: DecayProfile | None = None
    tail_start: int | None = None
    scale_base: float = 1.0
    scale_exponent: int = 0

    def __post_init__(self):
        object.__setattr__(self, "coefficients", _clean_coefficients(self.coefficients))
        if self.tail_start is not None:
            if self.decay is None:
                raise InvalidInputError("an implicit tail needs a decay profile")
            if self.tail_start < 1:
                raise InvalidIndexError("tail_start must be >= 1")
            if self.coefficients and max(self.coefficients) >= self.tail_start:
                raise InvalidInputError("stored coefficients overlap the implicit tail")
        if int(self.scale_exponent) != self.scale_exponent:
            raise InvalidInputError("scale exponents are integers")
        if self.scale_exponent == 0:
            object.__setattr__(self, "scale_base", 1.0)
        elif not (self.scale_base > 0 and math.isfinite(self.scale_base)):
            raise InvalidInputError("scale base must be positive and finite")
        if self.decay is not None and self.coefficients:
            idx = np.fromiter(self.coefficients, dtype=float)
            mags = np.abs(np.fromiter(self.coefficients.values(), dtype=complex))
            if np.any(mags > self.decay.envelope(idx) * (1 + 1e-12)):
                raise InvalidInputError("stored coefficients exceed the certified envelope")

    # -- construction -----------------------------------------------------
    @classmethod
    def basis(cls, k, value=1.0):
        return cls({k: value})

    @classmethod
    def zero(cls):
        return cls({})

    @classmethod
    def from_dense(cls, values, decay=None):
        """Entry ``values[i]`` becomes the coefficient of index ``i + 1``."""
        return cls({i + 1: v for i, v in enumerate(np.asarray(values).tolist()) if v != 0},
                   decay=decay)

    @classmethod
    def geometric_tail(cls, C, beta, center=1, start=1):
        """The sequence ``c_j = C exp(-beta |j - center|)`` for ``j >= start``."""
        return cls({}, decay=DecayProfile(C, beta, center), tail_start=start)

    # -- inspection -------------------------------------------------------
    @property
    def support(self):
        return tuple(self.coefficients)

    @property
    def is_finite(self):
        return self.tail_start is None

    @property
    def max_index(self):
        """Largest stored index (0 for the zero vector); ``inf`` with a tail."""
        if not self.is_finite:
            return math.inf
        return max(self.coefficients, default=0)

    @property
    def is_zero(self):
        return not self.coefficients and self.is_finite

    def coefficient(self, j):
        """Materialized coefficient at index ``j``."""
        if j < 1:
            raise InvalidIndexError(f"basis indices start at 1, got {j}")
        if j in self.coefficients:
            raw = self.coefficients[j]
        elif self.tail_start is not None and j >= self.tail_start:
            raw = float(self.decay.envelope(j))
        else:
            return 0.0
        return _scaled_scalar(raw, self.scale_base, self.scale_exponent)

    def materialized(self):
        """Fold the carried scale factor into the coefficients."""
        if self.scale_exponent == 0:
            return self
        if not self.is_finite:
            raise InvalidInputError("cannot materialize a scaled implicit tail")
        idx = list(self.coefficients)
        vals = _scaling.apply_factor(np.array(list(self.coefficients.values())),
                                     self.scale_base, self.scale_exponent)
        if not np.all(np.isfinite(vals)):
            from .exceptions import MaterializationOverflowError

            raise MaterializationOverflowError("coefficients overflow double precision")
        return SeqVector(dict(zip(idx, vals.tolist())))

    def to_dense(self, size):
        """Materialized coefficients of indices ``1..size`` as an array."""
        is_complex = any(isinstance(v, complex) for v in self.coefficients.values())
        out = np.zeros(size, dtype=complex if is_complex else float)
        for j in range(1, size + 1):
            c = self.coefficient(j)
            if c != 0:
                out[j - 1] = c
        return out

    def restricted(self, from_index):
        """Copy keeping only indices ``>= from_index``."""
        coeffs = {j: c for j, c in self.coefficients.items() if j >= from_index}
        tail = None if self.tail_start is None else max(self.tail_start, from_index)
        return replace(self, coefficients=coeffs, tail_start=tail)

    def truncated(self, up_to):
        """Finite copy keeping only indices ``<= up_to`` (tail made explicit)."""
        coeffs = {j: c for j, c in self.coefficients.items() if j <= up_to}
        if self.tail_start is not None:
            for j in range(self.tail_start, up_to + 1):
                coeffs[j] = float(self.decay.envelope(j))
        return SeqVector(coeffs, decay=self.decay, scale_base=self.scale_base,
                         scale_exponent=self.scale_exponent)

    # -- arithmetic -------------------------------------------------------
    def __mul__(self, scalar):
        if not np.isfinite(scalar):
            raise InvalidInputError("non-finite scalar")
        if scalar == 0:
            return SeqVector.zero()
        coeffs = {j: c * scalar for j, c in self.coefficients.items()}
        if self.is_finite:
            decay = None if self.decay is None else replace(self.decay, C=self.decay.C * abs(scalar))
            return replace(self, coefficients=coeffs, decay=decay)
        if scalar < 0 or isinstance(scalar, complex):
            raise InvalidInputError("implicit tails only scale by positive reals")
        return replace(self, coefficients=coeffs,
                       decay=replace(self.decay, C=self.decay.C * scalar))

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __add__(self, other):
        if not isinstance(other, SeqVector):
            return NotImplemented
        if other.is_zero:
            return self
        if self.is_zero:
            return other
        if not (self.is_finite and other.is_finite):
            raise InvalidInputError("only finitely supported vectors can be added")
        a, b = self, other
        if a.scale_exponent != 0 and b.scale_exponent != 0 and a.scale_base != b.scale_base:
            a, b = a.materialized(), b.materialized()
        base = a.scale_base if a.scale_exponent != 0 else b.scale_base
        exponent = max(a.scale_exponent, b.scale_exponent)
        out = {}
        for vec in (a, b):
            shift = vec.scale_exponent - exponent
            for j, c in vec.coefficients.items():
                out[j] = out.get(j, 0.0) + _scaled_scalar(c, base, shift)
        return SeqVector(out, scale_base=base, scale_exponent=exponent)

    def __sub__(self, other):
        if not isinstance(other, SeqVector):
            return NotImplemented
        return self + (-other)

    def __eq__(self, other):
        if not isinstance(other, SeqVector):
            return NotImplemented
        return (self.coefficients == other.coefficients and self.decay == other.decay
                and self.tail_start == other.tail_start
                and self.scale_exponent == other.scale_exponent
                and (self.scale_exponent == 0 or self.scale_base == other.scale_base))

    __hash__ = None

    # -- serialization ----------------------------------------------------
    def to_dict(self):
        data = {"coefficients": {str(j): (c if not isinstance(c, complex) else [c.real, c.imag])
                                 for j, c in self.coefficients.items()}}
        if self.decay is not None:
            data["decay"] = {"C": self.decay.C, "beta": self.decay.beta,
                             "center": self.decay.center}
        if self.tail_start is not None:
            data["tail_start"] = self.tail_start
        if self.scale_exponent:
            data["scale"] = {"base": self.scale_base, "exponent": self.scale_exponent}
        return data

    @classmethod
    def from_dict(cls, data):
        coeffs = {}
        for key, value in data.get("coefficients", {}).items():
            coeffs[int(key)] = complex(*value) if isinstance(value, (list, tuple)) else float(value)
        decay = data.get("decay")
        decay = None if decay is None else DecayProfile(decay["C"], decay["beta"],
                                                        decay.get("center", 1))
        scale = data.get("scale", {})
        return cls(coeffs, decay=decay, tail_start=data.get("tail_start"),
                   scale_base=scale.get("base", 1.0), scale_exponent=scale.get("exponent", 0))


# -- norms -------------------------------------------------------------------

def _logsumexp(terms):
    terms = np.asarray(terms, dtype=float)
    if terms.size == 0:
        return -math.inf
    top = np.max(terms)
    if top == -math.inf:
        return -math.inf
    return float(top + np.log(np.sum(np.exp(terms - top))))


def _log_envelope_series(weights, decay, p, start):
    """``log sum_{j>=start} (C e^{-beta|j-k0|})^p w_j`` (geometric envelope only)."""
    k0 = decay.center
    logs = []
    finite_part = range(start, k0)
    if len(finite_part):
        j = np.arange(start, k0)
        logs.extend((p * decay.log_envelope(j) + weights.log_values(j)).tolist())
    t = max(start, k0)
    x = math.exp(-decay.beta * p)
    # sum_{j>=t} C^p x^(j-k0) w_j = C^p x^(t-k0) w_t * sum_i x^i (w_{t+i}/w_t)
    logs.append(p * math.log(decay.C) - decay.beta * p * (t - k0)
                + weights.log_shifted_series(x, t))
    return _logsumexp(logs)


def _log_stored_sum(weights, coefficients, p, from_index=1):
    items = [(j, c) for j, c in coefficients.items() if j >= from_index]
    if not items:
        return -math.inf
    idx = np.array([j for j, _ in items], dtype=float)
    mags = np.abs(np.array([c for _, c in items], dtype=complex))
    return _logsumexp(p * np.log(mags) + weights.log_values(idx))


def _check_vector(v):
    if not isinstance(v, SeqVector):
        raise InvalidInputError(f"expected a SeqVector, got {type(v).__name__}")


def log_norm(space, v, from_index=1):
    """Natural log of the norm of ``v`` restricted to indices ``>= from_index``."""
    _check_vector(v)
    weights = space.coefficient_weights
    p = space.p
    parts = [_log_stored_sum(weights, v.coefficients, p, from_index)]
    if v.tail_start is not None:
        parts.append(_log_envelope_series(weights, v.decay, p, max(v.tail_start, from_index)))
    log_sum = _logsumexp(parts)
    if log_sum == -math.inf:
        return -math.inf
    return log_sum / p + _scaling.log_factor(v.scale_base, v.scale_exponent)


def norm(space, v):
    """Norm of ``v`` in ``space``, read in the space's basis mode.

    Finite supports are summed directly; an implicit geometric tail is summed
    in closed form.

    Examples
    --------
    >>> space = WeightedLpSpace(1.0)
    >>> norm(space, SeqVector({1: 1.0, 2: 1.0}))
    2.0
    """
    ln = log_norm(space, v)
    return 0.0 if ln == -math.inf else math.exp(ln)


def tail_norm(space, v, from_index):
    """Norm of ``v`` on indices ``>= from_index`` and a certified upper bound.

    The bound comes from the decay envelope when ``v`` carries one (stored
    entries never exceed it), and equals the value otherwise.
    """
    if from_index < 1:
        raise InvalidIndexError(f"from_index must be >= 1, got {from_index}")
    ln = log_norm(space, v, from_index)
    value = 0.0 if ln == -math.inf else math.exp(ln)
    if v.decay is None:
        return value, value
    envelope = _log_envelope_series(space.coefficient_weights, v.decay, space.p, from_index)
    bound = math.exp(envelope / space.p + _scaling.log_factor(v.scale_base, v.scale_exponent))
    if not v.is_finite or v.coefficients:
        return value, max(bound, value)
    return value, value


def scaled_basis_vector(space, k):
    """The unit-norm basis vector ``w_k^(-1/p) delta_k`` in the space's coordinates."""
    if int(k) != k or k < 1:
        raise InvalidIndexError(f"basis indices start at 1, got {k}")
    if space.basis == "scaled":
        return SeqVector({int(k): 1.0})
    w = space.weights(int(k))
    if 0 < w < math.inf:
        coefficient = w ** (-1.0 / space.p)
    else:
        coefficient = math.exp(-float(space.weights.log_values(k)) / space.p)
    return SeqVector({int(k): coefficient})


def lp_norm(values, p):
    """Plain ``l^p`` norm of a coefficient array."""
    values = np.abs(np.asarray(values))
    if values.size == 0:
        return 0.0
    top = values.max()
    if top == 0:
        return 0.0
    return float(top * np.sum((values / top) ** p) ** (1.0 / p))

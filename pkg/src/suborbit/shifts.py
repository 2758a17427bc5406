"""Left/right shifts on ``l^p_w`` and the weighted pair ``T = lam*L``, ``S = R/lam``.

Powers of ``lam`` are never multiplied into coefficients here.  ``T^n`` and
``S^n`` return vectors carrying ``lam**(+-n)`` as an integer exponent, so
``T^a S^b`` cancels exactly whatever the size of ``a`` and ``b``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from ._validation import check_int, check_positive, resolve_random_state
from .exceptions import ContractionError, InvalidInputError, UnboundedOperatorError
from .spaces import SeqVector, WeightedLpSpace, lp_norm, norm

DEFAULT_MARGIN = 0.5


def shift_norms(space):
    """Exact operator norms ``(||L||, ||R||)`` of the shifts on ``space``.

    In scaled mode both are 1.  In canonical mode they are
    ``sup_{k>=2} (w_{k-1}/w_k)^(1/p)`` and ``sup_{k>=2} (w_k/w_{k-1})^(1/p)``.
    """
    if space.basis == "scaled":
        return 1.0, 1.0
    down, up = space.weights.ratio_sups()
    if not math.isfinite(down):
        raise UnboundedOperatorError(
            "L", "left shift is unbounded: sup_k w_{k-1}/w_k diverges for this weight")
    if not math.isfinite(up):
        raise UnboundedOperatorError(
            "R", "right shift is unbounded: sup_k w_k/w_{k-1} diverges for this weight")
    return down ** (1.0 / space.p), up ** (1.0 / space.p)


def default_lambda(space, margin=DEFAULT_MARGIN):
    """``||R|| * (1 + margin)``, the default weight of the shift pair."""
    return shift_norms(space)[1] * (1.0 + margin)


@dataclass(frozen=True)
class ShiftOperators:
    """The operators ``T = lam*L`` and ``S = lam^{-1} R`` on a weighted space."""

    space: WeightedLpSpace
    lam: float
    norm_L: float
    norm_R: float

    def __post_init__(self):
        lam = check_positive(self.lam, "lambda")
        if not lam > self.norm_R:
            raise ContractionError(
                f"lambda={lam:g} must exceed ||R||={self.norm_R:g}; "
                "otherwise S = R/lambda is not a contraction")
        object.__setattr__(self, "lam", lam)

    @classmethod
    def from_space(cls, space, lam=None, margin=DEFAULT_MARGIN):
        norm_L, norm_R = shift_norms(space)
        if lam is None:
            lam = norm_R * (1.0 + margin)
        return cls(space, lam, norm_L, norm_R)

    @property
    def norm_S(self):
        return self.norm_R / self.lam

    @property
    def norm_T_bound(self):
        return self.lam * self.norm_L


def _shift_indices(v, offset):
    """Re-index ``j -> j + offset``, dropping anything that lands below 1."""
    coeffs = {j + offset: c for j, c in v.coefficients.items() if j + offset >= 1}
    decay = v.decay
    tail = v.tail_start
    if decay is not None:
        decay = decay.shifted(offset)
        if tail is not None:
            tail = max(tail + offset, 1)
            if decay is None:
                tail = None
    return replace(v, coefficients=coeffs, decay=decay, tail_start=tail)


def apply_L_pow(v, n):
    """``L^n v``: coefficient ``j`` of the result is coefficient ``j+n`` of ``v``."""
    n = check_int(n, "n", minimum=0)
    if n == 0:
        return v
    return _shift_indices(v, -n)


def apply_R_pow(v, n):
    """``R^n v``: every index moves up by ``n``."""
    n = check_int(n, "n", minimum=0)
    if n == 0:
        return v
    return _shift_indices(v, n)


def _rescale(v, base, exponent):
    if exponent == 0:
        return v
    if v.scale_exponent != 0 and v.scale_base != base:
        v = v.materialized()
    total = v.scale_exponent + exponent
    return replace(v, scale_base=base if total else 1.0, scale_exponent=total)


def apply_T_pow(ops, v, n):
    """``T^n v = lam^n L^n v`` with ``lam^n`` kept as a carried exponent."""
    n = check_int(n, "n", minimum=0)
    shifted = apply_L_pow(v, n)
    if shifted.is_zero:
        return SeqVector.zero()
    return _rescale(shifted, ops.lam, n)


def apply_S_pow(ops, v, n):
    """``S^n v = lam^{-n} R^n v`` with ``lam^{-n}`` kept as a carried exponent."""
    n = check_int(n, "n", minimum=0)
    shifted = apply_R_pow(v, n)
    if shifted.is_zero:
        return SeqVector.zero()
    return _rescale(shifted, ops.lam, -n)


def _basis_ratio(space, c):
    vec = SeqVector.from_dense(c)
    denominator = lp_norm(c, space.p)
    return norm(space, vec) / denominator


def sample_priesz_bounds(space, trials, max_dim, random_state=None):
    """Sampled p-Riesz ratios ``||sum c_k e_k|| / ||c||_p`` over random finite ``c``.

    Returns ``(A_upper, B_lower)``: the smallest observed ratio (an upper bound
    for the true lower Riesz bound) and the largest (a lower bound for the true
    upper bound).  Diagnostic only.
    """
    trials = check_int(trials, "trials", minimum=1)
    max_dim = check_int(max_dim, "max_dim", minimum=1)
    rng = resolve_random_state(random_state)
    lo, hi = math.inf, 0.0
    for _ in range(trials):
        dim = rng.randint(1, max_dim + 1)
        c = rng.standard_normal(dim)
        if not np.any(c):
            continue
        ratio = _basis_ratio(space, c)
        lo = min(lo, ratio)
        hi = max(hi, ratio)
    return lo, hi


def sampled_shift_norms(space, dim, trials, random_state=None):
    """Brute-force ``sup ||Lv||/||v||`` and ``sup ||Rv||/||v||`` over random ``v``.

    Vectors live in the first ``dim`` coordinates; the sample mixes dense
    Gaussian vectors with single basis vectors, which attain the sup for
    weighted shifts whenever it is attained.  Used as an oracle for
    :func:`shift_norms`.
    """
    dim = check_int(dim, "dim", minimum=2)
    trials = check_int(trials, "trials", minimum=1)
    rng = resolve_random_state(random_state)
    candidates = [SeqVector.basis(k) for k in range(1, dim + 1)]
    for _ in range(trials):
        support = rng.randint(1, dim + 1)
        c = np.zeros(dim)
        c[rng.choice(dim, size=support, replace=False)] = rng.standard_normal(support)
        if np.any(c):
            candidates.append(SeqVector.from_dense(c))
    sup_L = sup_R = 0.0
    for v in candidates:
        size = norm(space, v)
        sup_L = max(sup_L, norm(space, apply_L_pow(v, 1)) / size)
        sup_R = max(sup_R, norm(space, apply_R_pow(v, 1)) / size)
    return sup_L, sup_R


def check_riesz_consistency(space, A, B):
    """Whether the exact shift norms respect ``||L|| <= B/A`` and ``A/B <= ||R|| <= B/A``."""
    if A <= 0 or B < A:
        raise InvalidInputError(f"need 0 < A <= B, got A={A}, B={B}")
    norm_L, norm_R = shift_norms(space)
    tol = 1e-12
    return norm_L <= B / A + tol and A / B - tol <= norm_R <= B / A + tol

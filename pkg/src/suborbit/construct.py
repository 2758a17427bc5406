"""The generating vector ``phi = sum_j S^{alpha(j)} f_j`` and its suborbit.

``phi`` is kept lazily as the pairs ``(alpha(j), f_j)``.  Evaluating
``T^{alpha(k)} phi`` term by term only ever needs ``lam**(alpha(k)-alpha(j))``,
whose exponent is an exact integer, so nothing overflows even when
``lam**alpha(k)`` itself is far outside double range.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._validation import check_int, check_positive
from .exceptions import InvalidIndexError, InvalidInputError, MaterializationOverflowError
from .families import norms as family_norms
from .families import supports as family_supports
from .schedule import (
    EpsSchedule,
    eps_schedule,
    schedule_finite,
    schedule_localized,
    weighted_tail_sum,
)
from .shifts import ShiftOperators, apply_S_pow, apply_T_pow
from .spaces import SeqVector, WeightSequence, norm

_DOUBLE_LOG_LIMIT = 700.0


@dataclass(frozen=True, eq=False)
class OrbitRepresentation:
    """Lazy ``phi_N = sum_{j<=N} S^{alpha(j)} f_j`` plus a bound on ``||phi - phi_N||``."""

    ops: ShiftOperators
    schedule: object
    family: tuple
    truncation_index: int
    truncation_tail_bound: float

    @property
    def K(self):
        return len(self.family)

    @property
    def terms(self):
        return [(self.schedule[j], self.family[j - 1])
                for j in range(1, self.truncation_index + 1)]

    def materialize(self):
        """Explicit ``phi_N`` as a :class:`SeqVector`.

        Raises :class:`MaterializationOverflowError` when ``lam**alpha(N)``
        leaves double range; use :func:`evaluate_suborbit` instead.
        """
        if self.truncation_index and (
                self.schedule[self.truncation_index] * math.log(self.ops.lam) > _DOUBLE_LOG_LIMIT):
            raise MaterializationOverflowError(
                "lambda**alpha(N) exceeds double range; evaluate the suborbit lazily "
                "with evaluate_suborbit()")
        total = {}
        for alpha, f in self.terms:
            _accumulate(total, apply_S_pow(self.ops, f, alpha).materialized())
        return SeqVector(total)


def _accumulate(total, vec):
    for j, c in vec.coefficients.items():
        total[j] = total.get(j, 0.0) + c


def build_phi(ops, schedule, family, N=None):
    """Assemble the lazy generating vector from the first ``N`` family members."""
    family = tuple(family)
    K = len(family)
    if K == 0:
        raise InvalidInputError("empty family")
    if len(schedule) < K:
        raise InvalidInputError(f"schedule covers {len(schedule)} indices, family has {K}")
    N = K if N is None else check_int(N, "N", minimum=0)
    if N > K:
        raise InvalidInputError(f"truncation index N={N} exceeds K={K}")
    log_S = math.log(ops.norm_S)
    logs = []
    for j in range(N + 1, K + 1):
        size = norm(ops.space, family[j - 1])
        if size > 0:
            logs.append(schedule[j] * log_S + math.log(size))
    eps = schedule.eps
    # beyond K: ||S||^{alpha(j)} ||f_j|| <= ||S||^{alpha(K)} c eps_j for every j > K
    logs.append(schedule[K] * log_S + math.log(schedule.guarantee_factor) + eps.log_tail(K))
    top = max(logs)
    bound = math.exp(top) * sum(math.exp(t - top) for t in logs)
    return OrbitRepresentation(ops, schedule, family, N, bound)


def suborbit_terms(orbit, k):
    """The summands ``T^{alpha(k)} S^{alpha(j)} f_j``, ``j <= N``, with exponents carried."""
    _check_k(orbit, k)
    alpha_k = orbit.schedule[k]
    out = []
    for j, (alpha_j, f) in enumerate(orbit.terms, start=1):
        d = alpha_k - alpha_j
        term = apply_T_pow(orbit.ops, f, d) if d >= 0 else apply_S_pow(orbit.ops, f, -d)
        out.append((j, term))
    return out


def _check_k(orbit, k):
    if int(k) != k or not 1 <= k <= orbit.K:
        raise InvalidIndexError(f"k must lie in 1..{orbit.K}, got {k}")


def evaluate_suborbit(orbit, k):
    """``T^{alpha(k)} phi_N`` computed term by term with exact exponent arithmetic."""
    total = {}
    for _, term in suborbit_terms(orbit, k):
        if not term.is_zero:
            _accumulate(total, term.materialized())
    return SeqVector(total)


def evaluate_suborbit_naive(orbit, k):
    """Dense oracle: materialize ``phi_N`` and apply ``T`` literally ``alpha(k)`` times."""
    _check_k(orbit, k)
    lam = orbit.ops.lam
    top = max([orbit.schedule[orbit.truncation_index] if orbit.truncation_index else 0,
               orbit.schedule[k]])
    if top * math.log(lam) > _DOUBLE_LOG_LIMIT:
        raise MaterializationOverflowError(
            f"lambda**{top} is outside double range; the naive path cannot represent it")
    size = 1
    for alpha, f in orbit.terms:
        if not f.is_finite:
            raise InvalidInputError("the naive path needs finitely supported vectors")
        size = max(size, alpha + int(f.max_index))
    is_complex = any(isinstance(c, complex) for f in orbit.family for c in f.coefficients.values())
    phi = np.zeros(size, dtype=complex if is_complex else float)
    for alpha, f in orbit.terms:
        factor = lam ** (-alpha)
        for j, c in f.materialized().coefficients.items():
            phi[j + alpha - 1] += c * factor
    v = phi
    for _ in range(orbit.schedule[k]):
        v = lam * np.concatenate([v[1:], np.zeros(1, dtype=v.dtype)])
    if not np.all(np.isfinite(v)):
        raise MaterializationOverflowError("naive evaluation overflowed")
    return SeqVector.from_dense(v)


# -- error reports -------------------------------------------------------------------

@dataclass(frozen=True)
class ErrorRow:
    k: int
    alpha_k: int
    actual_error: float
    bound: float
    allowance: float
    quadrature: float | None = None

    @property
    def passed(self):
        return self.actual_error <= self.bound + self.allowance + (self.quadrature or 0.0)

    @property
    def ratio(self):
        return self.actual_error / self.bound if self.bound > 0 else math.inf


def _fmt(x):
    return format(float(x), ".17g")


@dataclass(frozen=True)
class ErrorReport:
    """Per-``k`` comparison of ``||f_k - T^{alpha(k)} phi||`` with the tail bound."""

    rows: tuple

    @property
    def passed(self):
        return all(row.passed for row in self.rows)

    @property
    def max_ratio(self):
        return max((row.ratio for row in self.rows), default=0.0)

    @property
    def errors(self):
        return [row.actual_error for row in self.rows]

    @property
    def has_quadrature(self):
        return any(row.quadrature is not None for row in self.rows)

    def __len__(self):
        return len(self.rows)

    def to_csv(self, stream=None):
        """Write the report; returns the text when ``stream`` is None."""
        own = stream is None
        stream = io.StringIO() if own else stream
        writer = csv.writer(stream, lineterminator="\n")
        header = ["k", "alpha_k", "actual_error", "bound", "allowance"]
        if self.has_quadrature:
            header.append("quadrature")
        writer.writerow(header + ["pass"])
        for row in self.rows:
            line = [row.k, row.alpha_k, _fmt(row.actual_error), _fmt(row.bound),
                    _fmt(row.allowance)]
            if self.has_quadrature:
                line.append(_fmt(row.quadrature or 0.0))
            writer.writerow(line + ["true" if row.passed else "false"])
        return stream.getvalue() if own else None


def truncation_allowance(orbit, k):
    """Bound on the part of ``T^{alpha(k)} phi`` coming from unprovided members ``j > N``."""
    total = 0.0
    log_S = math.log(orbit.ops.norm_S)
    for j in range(max(orbit.truncation_index + 1, k), orbit.K + 1):
        size = norm(orbit.ops.space, orbit.family[j - 1])
        if size > 0:
            total += math.exp((orbit.schedule[j] - orbit.schedule[k]) * log_S + math.log(size))
    return total


def _row(orbit, eps, space, k):
    approx = evaluate_suborbit(orbit, k)
    f_k = orbit.family[k - 1]
    actual = norm(space, f_k - approx)
    return ErrorRow(k, orbit.schedule[k], actual, eps.tail(k), truncation_allowance(orbit, k))


def verify_bounds(orbit, eps=None, space=None, jobs=1):
    """Measure every ``||f_k - T^{alpha(k)} phi_N||`` against ``sum_{j>k} eps_j``.

    Failures are recorded in the report, never raised.  ``jobs > 1`` spreads
    the independent per-``k`` evaluations over threads; rows stay in ``k``
    order.
    """
    eps = orbit.schedule.eps if eps is None else eps
    space = orbit.ops.space if space is None else space
    ks = range(1, orbit.K + 1)
    if jobs and jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(lambda k: _row(orbit, eps, space, k), ks))
    else:
        rows = [_row(orbit, eps, space, k) for k in ks]
    return ErrorReport(tuple(rows))


def eps_close_sums(report, p, epsilon, variant="plain", space=None):
    """``(lhs, rhs)`` of the epsilon-closeness inequality of the given variant.

    The left side adds the certified contribution of every ``k`` beyond the
    report (``error_k <= tail(k)``).
    """
    p = float(p)
    if p < 1:
        raise InvalidInputError(f"p must be >= 1, got {p}")
    eps = eps_schedule(variant, epsilon, space)
    K = len(report)
    errors = np.asarray(report.errors, dtype=float)
    if variant == "plain":
        lhs = float(np.sum(errors ** p)) + weighted_tail_sum(None, p, eps, K)
        return lhs, epsilon ** p / (2.0 ** p - 1.0)
    weights = space.weights
    w = weights(np.arange(1, K + 1))
    lhs = float(np.sum(errors ** p * w)) + weighted_tail_sum(weights, p, eps, K)
    if variant == "weighted":
        return lhs, epsilon ** p
    return lhs ** (1.0 / p), float(epsilon)


def verify_eps_close(report, p, epsilon, variant="plain", space=None, rtol=1e-12):
    """Whether the approximation is epsilon-close in the sense of ``variant``."""
    lhs, rhs = eps_close_sums(report, p, epsilon, variant, space)
    return lhs <= rhs * (1.0 + rtol)


# -- end-to-end runs -------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SequenceRun:
    ops: ShiftOperators
    eps: EpsSchedule
    schedule: object
    orbit: OrbitRepresentation
    report: ErrorReport


def run_finite_pipeline(space, family, lam=None, eps=None, N=None, jobs=1):
    """Schedule, build and verify the construction for finitely supported vectors."""
    family = list(family)
    ops = ShiftOperators.from_space(space, lam)
    eps = eps_schedule("plain", 1.0) if eps is None else eps
    K = len(family)
    schedule = schedule_finite(family_supports(family), family_norms(space, family),
                               ops.norm_S, eps, K)
    orbit = build_phi(ops, schedule, family, N)
    return SequenceRun(ops, eps, schedule, orbit, verify_bounds(orbit, eps, space, jobs))


def run_localized_pipeline(space, family, C, beta, lam=None, eps=None, N=None, B=1.0,
                           xd_norm=None, include_n0=True, jobs=1):
    """Schedule, build and verify the construction for exponentially localized vectors.

    ``xd_norm`` defaults to ``||{e^{-beta j}}||_{l^p}``, the right value when
    the coefficient space is plain ``l^p`` (scaled basis, ``B = 1``).
    """
    family = list(family)
    ops = ShiftOperators.from_space(space, lam)
    eps = eps_schedule("plain", 1.0) if eps is None else eps
    beta = check_positive(beta, "beta")
    if xd_norm is None:
        from .spaces import WeightedLpSpace

        xd_norm = norm(WeightedLpSpace(space.p, WeightSequence.constant()),
                       SeqVector.geometric_tail(math.exp(-beta), beta, 1, 1))
    schedule = schedule_localized(C, beta, ops.lam, ops.norm_S, B, family_norms(space, family),
                                  xd_norm, eps, len(family), include_n0=include_n0)
    orbit = build_phi(ops, schedule, family, N)
    return SequenceRun(ops, eps, schedule, orbit, verify_bounds(orbit, eps, space, jobs))


__all__ = [
    "ErrorReport", "ErrorRow", "OrbitRepresentation", "SequenceRun", "build_phi",
    "eps_close_sums", "evaluate_suborbit", "evaluate_suborbit_naive", "run_finite_pipeline",
    "run_localized_pipeline", "suborbit_terms", "truncation_allowance", "verify_bounds",
    "verify_eps_close",
]


"""Epsilon schedules and minimal power schedules ``alpha(1) < alpha(2) < ...``.

Each construction (finitely supported, exponentially localized, function
space) is a *recursion*: given ``alpha(1..k-1)`` it emits the lower bounds
that ``alpha(k)`` must meet.  A schedule is built by taking the smallest
integer meeting every bound, and re-verified by replaying the same bounds on
the finished sequence, so any candidate sequence can be checked the same way.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from ._validation import check_int, check_positive
from .exceptions import (
    ContractionError,
    DecayTooSlowError,
    GrowthConditionError,
    InvalidIndexError,
    InvalidInputError,
    UnsupportedWeightError,
)
from .spaces import WeightedLpSpace, WeightSequence

VARIANTS = ("plain", "weighted", "sequence")

# absolute slack on log-formula thresholds so float noise cannot flip a tie
_TOL = 1e-9


@dataclass(frozen=True)
class EpsSchedule:
    """``eps_j = (epsilon / M) * 2**-j``; ``tail(k) = sum_{j>k} eps_j``."""

    epsilon: float
    M: float = 1.0
    variant: str = "plain"
    space: WeightedLpSpace | None = None

    def __post_init__(self):
        check_positive(self.epsilon, "epsilon")
        if not (math.isfinite(self.M) and self.M > 0):
            raise InvalidInputError(f"normalization M must be positive, got {self.M}")
        if self.variant not in VARIANTS:
            raise InvalidInputError(f"variant must be one of {VARIANTS}, got {self.variant!r}")

    @property
    def scale(self):
        return self.epsilon / self.M

    def term(self, j):
        # ldexp scales by an exact power of two, so tails telescope exactly
        return math.ldexp(self.scale, -j)

    def tail(self, k):
        return math.ldexp(self.scale, -k)

    def log_term(self, j):
        return math.log(self.scale) - j * math.log(2.0)

    def log_tail(self, k):
        return math.log(self.scale) - k * math.log(2.0)

    @property
    def total(self):
        return self.scale

    def to_dict(self):
        data = {"epsilon": self.epsilon, "M": self.M, "variant": self.variant}
        if self.space is not None:
            data["space"] = self.space.to_dict()
        return data


def normalization_sum(space):
    """``sum_k 2^{-kp} w_k`` for the weights of ``space`` (canonical reading)."""
    try:
        return space.weights.power_series(2.0 ** (-space.p), 1)
    except UnsupportedWeightError as exc:
        raise UnsupportedWeightError(f"normalization sum unavailable: {exc}") from None


def eps_schedule(variant="plain", epsilon=1.0, space=None):
    """Build the epsilon schedule of the requested variant.

    ``plain``     ``M = 1``
    ``weighted``  ``M = max(1, sum_k 2^{-kp} w_k)`` with ``(p, w)`` from ``space``
    ``sequence``  ``M = ||{2^{-k}}||`` in ``space`` read as a sequence space
    """
    epsilon = check_positive(epsilon, "epsilon")
    if variant == "plain":
        return EpsSchedule(epsilon, 1.0, "plain", space)
    if space is None:
        raise InvalidInputError(f"variant {variant!r} needs a weighted space")
    total = normalization_sum(space)
    if variant == "weighted":
        return EpsSchedule(epsilon, max(1.0, total), "weighted", space)
    if variant == "sequence":
        return EpsSchedule(epsilon, total ** (1.0 / space.p), "sequence", space)
    raise InvalidInputError(f"variant must be one of {VARIANTS}, got {variant!r}")


# -- constraints ---------------------------------------------------------------

@dataclass(frozen=True)
class Constraint:
    """Lower bound on ``alpha(k)`` (``increment=False``) or on ``alpha(k)-alpha(k-1)``."""

    name: str
    bound: float
    increment: bool = True
    strict: bool = False

    def minimal_step(self):
        """Smallest integer value of the constrained quantity."""
        if self.bound == -math.inf:
            return -math.inf
        if self.strict:
            return math.floor(self.bound + _TOL) + 1
        return math.ceil(self.bound - _TOL)

    def minimal_alpha(self, previous):
        step = self.minimal_step()
        return step + previous if self.increment else step

    def holds(self, alpha, previous):
        value = alpha - previous if self.increment else alpha
        if self.bound == -math.inf:
            return True
        if self.strict:
            return value > self.bound + _TOL
        return value >= self.bound - _TOL


@dataclass(frozen=True)
class Violation:
    k: int
    constraint: str
    value: float
    bound: float


def _safe_log(x):
    return math.log(x) if x > 0 else -math.inf


def _log_ratio(numerator_log, denominator_log):
    """``numerator/denominator`` with a negative denominator (log of a contraction).

    A zero vector gives ``numerator = +inf`` and hence a vacuous ``-inf`` bound.
    """
    return numerator_log / denominator_log


class _Recursion:
    """Base class: subclasses provide ``constraints(k, previous_alphas)``."""

    theorem_tag = ""
    #: value of alpha(1) fixed by the construction, or None
    fixed_first = None

    def __init__(self, eps, K):
        self.eps = eps
        self.K = check_int(K, "K", minimum=1)

    def constraints(self, k, alphas):  # pragma: no cover - abstract
        raise NotImplementedError

    def threshold(self, k, alphas):
        """Value recorded in ``PowerSchedule.r_values`` for step ``k``."""
        return max((c.bound for c in self.constraints(k, alphas)), default=0.0)

    def build(self):
        alphas, r_values, binding = [], [], []
        for k in range(1, self.K + 1):
            cons = self.constraints(k, alphas)
            previous = alphas[-1] if alphas else 0
            if k == 1 and self.fixed_first is not None:
                alpha, name = self.fixed_first, "fixed"
            else:
                candidates = [(c.minimal_alpha(previous), c.name) for c in cons]
                alpha, name = max(candidates, key=lambda t: t[0])
                alpha = int(alpha)
            alphas.append(alpha)
            r_values.append(self.threshold(k, alphas[:-1]))
            binding.append(name)
        return PowerSchedule(tuple(alphas), self.theorem_tag, tuple(r_values),
                             tuple(binding), self)

    def violations(self, alphas):
        alphas = [int(a) for a in alphas]
        found = []
        for k in range(1, len(alphas) + 1):
            alpha = alphas[k - 1]
            previous = alphas[k - 2] if k > 1 else 0
            if k == 1 and self.fixed_first is not None and alpha != self.fixed_first:
                found.append(Violation(1, "fixed", alpha, self.fixed_first))
            for c in self.constraints(k, alphas[:k - 1]):
                if not c.holds(alpha, previous):
                    value = alpha - previous if c.increment else alpha
                    found.append(Violation(k, c.name, value, c.bound))
        return found


@dataclass(frozen=True)
class PowerSchedule:
    """Strictly increasing ``alpha(1..K)`` with the recursion that produced it."""

    alphas: tuple
    theorem_tag: str
    r_values: tuple
    binding: tuple
    recursion: _Recursion = field(repr=False, compare=False)

    def __len__(self):
        return len(self.alphas)

    def __getitem__(self, k):
        """``alpha(k)`` with 1-based ``k``."""
        if not 1 <= k <= len(self.alphas):
            raise InvalidIndexError(f"schedule covers k = 1..{len(self.alphas)}, got {k}")
        return self.alphas[k - 1]

    @property
    def K(self):
        return len(self.alphas)

    @property
    def eps(self):
        return self.recursion.eps

    @property
    def guarantee_factor(self):
        """Per-term factor ``c`` in ``||S||^{alpha(j)-alpha(j-1)} ||f_j|| <= c eps_j``."""
        return 1.0 if self.theorem_tag == "finite" else 0.5

    def violations(self, alphas=None):
        return self.recursion.violations(self.alphas if alphas is None else alphas)

    def verify(self):
        """Replay every defining inequality; True when all hold."""
        return not self.violations()

    def minimality_probe(self):
        """For each k, the violations caused by lowering ``alpha(k)`` by one."""
        report = {}
        for k in range(1, self.K + 1):
            probe = list(self.alphas)
            probe[k - 1] -= 1
            report[k] = self.recursion.violations(probe)
        return report

    def is_minimal(self):
        return all(report for report in self.minimality_probe().values())

    def rows(self):
        return [(k, a, b) for k, (a, b) in enumerate(zip(self.alphas, self.binding), start=1)]


def _check_contraction(norm_S):
    if not (0 < norm_S < 1):
        raise ContractionError(f"need 0 < ||S|| < 1, got {norm_S}")
    return math.log(norm_S)


def _check_lengths(K, **lists):
    for name, values in lists.items():
        if len(values) < K:
            raise InvalidInputError(f"{name} has {len(values)} entries, need K={K}")


# -- finitely supported families -------------------------------------------------

class FiniteRecursion(_Recursion):
    """Steps for families with ``f_k`` in the span of the first ``N(k)`` basis vectors.

    ``alpha(1) >= max(r_1, 0)`` and, for ``k >= 2``,
    ``alpha(k) - alpha(k-1) >= max(log-term, N(k-1), N(k), 1)`` with
    log-term ``(ln eps_k - ln ||f_k||) / ln ||S||``.
    """

    theorem_tag = "finite"

    def __init__(self, supports, norms, norm_S, eps, K):
        super().__init__(eps, K)
        _check_lengths(self.K, supports=supports, norms=norms)
        self.log_S = _check_contraction(norm_S)
        self.norm_S = norm_S
        self.supports = [check_int(n, "N(k)", minimum=0) for n in supports[:self.K]]
        self.norms = [check_positive(x, "||f_k||", strict=False) for x in norms[:self.K]]

    def log_term(self, k):
        return _log_ratio(self.eps.log_term(k) - _safe_log(self.norms[k - 1]), self.log_S)

    def r_value(self, k):
        return max(self.log_term(k), self.supports[k - 1])

    def threshold(self, k, alphas):
        return self.r_value(k)

    def constraints(self, k, alphas):
        if k == 1:
            return [Constraint("log", self.log_term(1), increment=False),
                    Constraint("support", self.supports[0], increment=False),
                    Constraint("nonnegative", 0.0, increment=False)]
        return [Constraint("log", self.log_term(k)),
                Constraint("support_prev", self.supports[k - 2]),
                Constraint("support", self.supports[k - 1]),
                Constraint("monotone", 1.0)]


def schedule_finite(supports, norms, norm_S, eps, K):
    """Minimal schedule for a family of finitely supported vectors."""
    return FiniteRecursion(supports, norms, norm_S, eps, K).build()


# -- exponentially localized families ----------------------------------------------

class LocalizedRecursion(_Recursion):
    """Steps for families with coordinates bounded by ``C exp(-beta |j-k|)``.

    ``alpha(1) = 0``; for ``k >= 2``:

    * ``half_eps``: ``||S||^{alpha(k)-alpha(k-1)} ||f_k|| <= eps_k / 2``
    * ``growth``: ``alpha(k) >= alpha(k-1) + k - 2``
    * ``log_formula`` (strict): ``alpha(k) > (ln tail_k - ln ||{e^{-beta j}}|| -
      ln sum_n (lam e^{-beta})^{-alpha(n)} e^{beta n} - ln 2BC) / (ln lam - beta)``

    The inner sum runs over ``n = 1..k-1``; with ``include_n0`` it also
    carries the ``n = 0`` term read with ``alpha(0) = 0`` (a constant 1).
    """

    theorem_tag = "localized"
    fixed_first = 0

    def __init__(self, C, beta, lam, norm_S, B_upper, norms, xd_norm, eps, K,
                 include_n0=True):
        super().__init__(eps, K)
        _check_lengths(self.K, norms=norms)
        self.C = check_positive(C, "C")
        self.beta = check_positive(beta, "beta")
        self.lam = check_positive(lam, "lambda")
        self.B = check_positive(B_upper, "B")
        self.xd_norm = check_positive(xd_norm, "||{exp(-beta j)}||")
        self.log_S = _check_contraction(norm_S)
        self.norm_S = norm_S
        self.denominator = math.log(self.lam) - self.beta
        if not all(map(math.isfinite, (self.denominator, self.log_S))):
            raise InvalidInputError("log formula inputs must be finite")
        if self.denominator >= 0:
            raise DecayTooSlowError(
                f"beta={self.beta:g} must exceed ln(lambda)={math.log(self.lam):g}")
        self.norms = [check_positive(x, "||f_k||", strict=False) for x in norms[:self.K]]
        self.include_n0 = bool(include_n0)

    def log_inner_sum(self, k, alphas):
        # terms exp(alpha(n)(beta - ln lam) + beta n), combined by log-sum-exp
        terms = [a * -self.denominator + self.beta * n
                 for n, a in enumerate(alphas[:k - 1], start=1)]
        if self.include_n0:
            terms.append(0.0)
        if not terms:
            return -math.inf
        top = max(terms)
        return top + math.log(sum(math.exp(t - top) for t in terms))

    def log_formula(self, k, alphas):
        numerator = (self.eps.log_tail(k) - math.log(self.xd_norm)
                     - self.log_inner_sum(k, alphas) - math.log(2 * self.B * self.C))
        return numerator / self.denominator

    def half_eps(self, k):
        return _log_ratio(self.eps.log_term(k) - math.log(2.0) - _safe_log(self.norms[k - 1]),
                          self.log_S)

    def threshold(self, k, alphas):
        return self.log_formula(k, alphas) if k > 1 else 0.0

    def constraints(self, k, alphas):
        if k == 1:
            return [Constraint("nonnegative", 0.0, increment=False)]
        return [Constraint("half_eps", self.half_eps(k)),
                Constraint("growth", k - 2.0),
                Constraint("log_formula", self.log_formula(k, alphas), increment=False,
                           strict=True),
                Constraint("monotone", 1.0)]


def schedule_localized(C, beta, lam, norm_S, B_upper, norms, Xd_norm_exp_beta, eps, K,
                       include_n0=True):
    """Minimal schedule for an exponentially localized family."""
    return LocalizedRecursion(C, beta, lam, norm_S, B_upper, norms, Xd_norm_exp_beta, eps,
                              K, include_n0=include_n0).build()


# -- function spaces -------------------------------------------------------------

class FunctionRecursion(_Recursion):
    """Steps for half-line functions with certified tails ``C_k mu^{-a}``.

    ``alpha(1) = 0``; for ``k >= 2``:

    * ``half_eps`` (strict): ``||S||^{alpha(k)-alpha(k-1)} ||f_k|| < eps_k / 2``
    * ``cutoff``: ``alpha(k) - alpha(k-1) >= a_{k-1}``
    * ``log_formula``: ``alpha(k) >= (ln 2 + ln sum_{n<k} C_n rho^{alpha(n)} - ln tail_k)
      / ln rho`` with ``rho = mu / (lam ||T_{-1}||)``
    """

    theorem_tag = "function"
    fixed_first = 0

    def __init__(self, norms, norm_S, lam, norm_Tminus1, mu, a_ks, C_ks, eps, K):
        super().__init__(eps, K)
        _check_lengths(self.K, norms=norms, a_ks=a_ks, C_ks=C_ks)
        self.log_S = _check_contraction(norm_S)
        self.norm_S = norm_S
        self.lam = check_positive(lam, "lambda")
        self.norm_Tm1 = check_positive(norm_Tminus1, "||T_{-1}||")
        self.mu = check_positive(mu, "mu")
        if not self.mu > self.lam * self.norm_Tm1:
            raise GrowthConditionError(
                f"mu={self.mu:g} must exceed lambda*||T_-1||={self.lam * self.norm_Tm1:g}")
        self.log_rho = math.log(self.mu) - math.log(self.lam * self.norm_Tm1)
        self.norms = [check_positive(x, "||f_k||", strict=False) for x in norms[:self.K]]
        self.a_ks = [check_int(a, "a_k", minimum=0) for a in a_ks[:self.K]]
        self.C_ks = [check_positive(c, "C_k") for c in C_ks[:self.K]]

    def log_formula(self, k, alphas):
        terms = [math.log(c) + a * self.log_rho
                 for c, a in zip(self.C_ks[:k - 1], alphas[:k - 1])]
        top = max(terms)
        log_sum = top + math.log(sum(math.exp(t - top) for t in terms))
        return (math.log(2.0) + log_sum - self.eps.log_tail(k)) / self.log_rho

    def half_eps(self, k):
        return _log_ratio(self.eps.log_term(k) - math.log(2.0) - _safe_log(self.norms[k - 1]),
                          self.log_S)

    def threshold(self, k, alphas):
        return self.log_formula(k, alphas) if k > 1 else 0.0

    def constraints(self, k, alphas):
        if k == 1:
            return [Constraint("nonnegative", 0.0, increment=False)]
        return [Constraint("half_eps", self.half_eps(k), strict=True),
                Constraint("cutoff", float(self.a_ks[k - 2])),
                Constraint("log_formula", self.log_formula(k, alphas), increment=False),
                Constraint("monotone", 1.0)]


def schedule_function(norms, norm_S, lam, norm_Tminus1, mu, a_ks, C_ks, eps, K):
    """Minimal schedule for a family in a translation-invariant function space."""
    return FunctionRecursion(norms, norm_S, lam, norm_Tminus1, mu, a_ks, C_ks, eps,
                             K).build()


def weighted_tail_sum(weights, p, eps, K):
    """``sum_{k>K} tail(k)^p w_k``: the certified contribution of unlisted ``k``."""
    x = 2.0 ** (-p)
    if isinstance(weights, WeightSequence):
        return eps.scale ** p * weights.power_series(x, K + 1)
    return eps.scale ** p * x ** (K + 1) / (1.0 - x)


__all__ = [
    "Constraint", "EpsSchedule", "FiniteRecursion", "FunctionRecursion",
    "LocalizedRecursion", "PowerSchedule", "Violation", "eps_schedule",
    "normalization_sum", "schedule_finite", "schedule_function", "schedule_localized",
    "weighted_tail_sum",
]


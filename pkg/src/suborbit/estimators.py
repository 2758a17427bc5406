"""scikit-learn style front ends for the three constructions.

Each estimator is fitted on a family given as a 2-D array whose row ``k`` is
``f_{k+1}`` (sequence coefficients, or grid samples for functions).  After
``fit`` the schedule, the lazy generating vector and the error report are
available as attributes; ``transform`` returns the approximants
``T^{alpha(k)} phi`` in the same layout.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .construct import (
    evaluate_suborbit,
    run_finite_pipeline,
    run_localized_pipeline,
    verify_eps_close,
)
from .exceptions import InvalidInputError
from .function_space import GridFunction, ModerateWeight, build_function_orbit, certify_family
from .schedule import eps_schedule
from .spaces import DecayProfile, SeqVector, WeightedLpSpace, WeightSequence


def _as_family_array(X, allow_complex=False):
    X = np.asarray(X)
    if X.ndim != 2 or 0 in X.shape:
        raise InvalidInputError(f"expected a non-empty 2-D array, got shape {X.shape}")
    if np.iscomplexobj(X) and not allow_complex:
        raise InvalidInputError("complex coefficients are only supported for grid functions")
    if not np.iscomplexobj(X):
        X = X.astype(float)
    if not np.all(np.isfinite(X)):
        raise InvalidInputError("input contains non-finite values")
    return X


# ``transform`` returns the fitted approximants and may be called without ``X``,
# so sklearn's pandas/polars output wrapping is switched off.
class _SequenceApproximator(TransformerMixin, BaseEstimator, auto_wrap_output_keys=None):
    def _space(self):
        weight = WeightSequence.from_dict(self.weight or {"kind": "constant"})
        return WeightedLpSpace(self.p, weight, self.basis)

    def _eps(self, space):
        return eps_schedule(self.variant, self.epsilon,
                            None if self.variant == "plain" else space)

    def _store(self, run, X):
        self.space_ = run.ops.space
        self.ops_ = run.ops
        self.lambda_ = run.ops.lam
        self.eps_ = run.eps
        self.schedule_ = run.schedule
        self.alphas_ = np.asarray(run.schedule.alphas)
        self.orbit_ = run.orbit
        self.report_ = run.report
        self.n_features_in_ = X.shape[1]
        self.n_members_ = X.shape[0]
        return self

    def transform(self, X=None):
        """Approximants ``T^{alpha(k)} phi`` truncated to the fitted width."""
        check_is_fitted(self, "orbit_")
        if X is not None:
            X = _as_family_array(X)
            if X.shape != (self.n_members_, self.n_features_in_):
                raise InvalidInputError(
                    f"transform expects the fitted family shape "
                    f"{(self.n_members_, self.n_features_in_)}, got {X.shape}")
        return np.vstack([evaluate_suborbit(self.orbit_, k).to_dense(self.n_features_in_)
                          for k in range(1, self.n_members_ + 1)])

    def score(self, X=None, y=None):
        """Fraction of members whose certified bound holds."""
        check_is_fitted(self, "report_")
        return float(np.mean([row.passed for row in self.report_.rows]))

    def is_eps_close(self):
        check_is_fitted(self, "report_")
        return verify_eps_close(self.report_, self.space_.p, self.epsilon, self.variant,
                                self.space_)


class FiniteSuborbitApproximator(_SequenceApproximator):
    """Suborbit approximation of finitely supported sequences.

    Parameters
    ----------
    p : float, default=2.0
        Exponent of the sequence space.
    weight : dict or None
        Weight specification, e.g. ``{"kind": "geometric", "ratio": 2.0}``.
    basis : {"canonical", "scaled"}
        Basis the shifts act on.
    lam : float or None
        Weight of ``T = lam L``; ``None`` picks ``1.5 ||R||``.
    epsilon : float, default=1.0
    variant : {"plain", "weighted", "sequence"}
    truncation : int or None
        Number of members summed into ``phi`` (all by default).
    n_jobs : int, default=1
        Threads used to verify the per-member bounds.

    Examples
    --------
    >>> import numpy as np
    >>> est = FiniteSuborbitApproximator(lam=4.0).fit(np.eye(3))
    >>> est.alphas_.tolist()
    [1, 3, 6]
    """

    def __init__(self, p=2.0, weight=None, basis="canonical", lam=None, epsilon=1.0,
                 variant="plain", truncation=None, n_jobs=1):
        self.p = p
        self.weight = weight
        self.basis = basis
        self.lam = lam
        self.epsilon = epsilon
        self.variant = variant
        self.truncation = truncation
        self.n_jobs = n_jobs

    def fit(self, X, y=None):
        X = _as_family_array(X)
        space = self._space()
        family = [SeqVector.from_dense(row) for row in X]
        run = run_finite_pipeline(space, family, self.lam, self._eps(space), self.truncation,
                                  self.n_jobs)
        return self._store(run, X)


class LocalizedSuborbitApproximator(_SequenceApproximator):
    """Suborbit approximation of exponentially localized sequences.

    Row ``k`` must satisfy ``|X[k, j]| <= C exp(-beta |j - k|)``; entries
    beyond the array are taken as zero.

    Parameters
    ----------
    C, beta : float
        The localization envelope; ``beta > log(lam)`` is required.
    B : float, default=1.0
        Upper basis constant of the coefficient space.
    include_n0 : bool, default=True
        Whether the inner sum of the log formula carries the constant ``n = 0`` term.
    """

    def __init__(self, C=1.0, beta=2.0, p=2.0, weight=None, basis="canonical", lam=None,
                 epsilon=1.0, variant="plain", B=1.0, include_n0=True, truncation=None,
                 n_jobs=1):
        self.C = C
        self.beta = beta
        self.p = p
        self.weight = weight
        self.basis = basis
        self.lam = lam
        self.epsilon = epsilon
        self.variant = variant
        self.B = B
        self.include_n0 = include_n0
        self.truncation = truncation
        self.n_jobs = n_jobs

    def fit(self, X, y=None):
        X = _as_family_array(X)
        space = self._space()
        family = [SeqVector(dict(enumerate(row, start=1)), decay=DecayProfile(self.C, self.beta, k))
                  for k, row in enumerate(X, start=1)]
        run = run_localized_pipeline(space, family, self.C, self.beta, self.lam,
                                     self._eps(space), self.truncation, self.B,
                                     include_n0=self.include_n0, jobs=self.n_jobs)
        return self._store(run, X)


class FunctionSuborbitApproximator(TransformerMixin, BaseEstimator, auto_wrap_output_keys=None):
    """Suborbit approximation of half-line functions sampled on a grid.

    Row ``k`` of ``X`` holds the midpoint samples of ``f_{k+1}`` on cells of
    width ``1/q``.  Tail certificates are fitted with a common rate.

    Parameters
    ----------
    q : int
        Cells per unit length.
    p : float, default=1.0
    weight : dict or None
        ``ModerateWeight`` fields, e.g. ``{"kind": "exponential", "gamma": 0.1}``.
    lam, mu : float or None
        Operator weight and decay rate (defaults as in ``build_function_orbit``).
    d0 : float, default=0.0
        Cutoff from which the tail certificates are issued.
    """

    def __init__(self, q=64, p=1.0, weight=None, lam=None, mu=None, epsilon=1.0, d0=0.0,
                 truncation=None, n_jobs=1):
        self.q = q
        self.p = p
        self.weight = weight
        self.lam = lam
        self.mu = mu
        self.epsilon = epsilon
        self.d0 = d0
        self.truncation = truncation
        self.n_jobs = n_jobs

    def fit(self, X, y=None):
        X = _as_family_array(X, allow_complex=True)
        weight = ModerateWeight.from_dict(self.weight) if self.weight else ModerateWeight()
        functions = [GridFunction(row, self.q, self.p, weight) for row in X]
        family = certify_family(functions, self.d0)
        orbit = build_function_orbit(family, self.lam, self.mu,
                                     eps_schedule("plain", self.epsilon), N=self.truncation)
        self.family_ = family
        self.orbit_ = orbit
        self.schedule_ = orbit.schedule
        self.alphas_ = np.asarray(orbit.schedule.alphas)
        self.lambda_ = orbit.lam
        self.mu_ = orbit.mu
        self.report_ = orbit.verify(self.n_jobs)
        self.n_features_in_ = X.shape[1]
        self.n_members_ = X.shape[0]
        return self

    def transform(self, X=None):
        """Approximants ``T^{alpha(k)} phi`` on the fitted grid."""
        check_is_fitted(self, "orbit_")
        return np.vstack([self.orbit_.evaluate(k).values[:self.n_features_in_]
                          for k in range(1, self.n_members_ + 1)])

    def score(self, X=None, y=None):
        check_is_fitted(self, "report_")
        return float(np.mean([row.passed for row in self.report_.rows]))


__all__ = [
    "FiniteSuborbitApproximator", "FunctionSuborbitApproximator",
    "LocalizedSuborbitApproximator",
]

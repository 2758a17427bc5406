"""Closeness checks and perturbed bounds for atomic decompositions.

If a system ``{f_k}`` has bounds ``A <= B`` and a second system ``{g_k}``
satisfies ``||sum c_k (f_k - g_k)|| <= eps ||c||`` with ``eps < 1/B``, then
``{g_k}`` has bounds ``A/(1 + eps B)`` and ``B/(1 - eps B)``.  For ``p = 2``
the bounds of a finite system are the extreme singular values of its
analysis matrix, which gives a desk-scale check of that envelope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._validation import check_int, check_positive
from .construct import evaluate_suborbit, run_finite_pipeline
from .exceptions import InvalidInputError, PreconditionError
from .families import canonical_family
from .schedule import eps_schedule
from .spaces import SeqVector, WeightedLpSpace


@dataclass(frozen=True, eq=False)
class AtomicSystem:
    """``K`` vectors truncated to the first ``D`` coordinates, with claimed bounds.

    Attributes
    ----------
    matrix : ndarray of shape (K, D)
        Row ``k`` holds the coefficients of ``f_{k+1}``; it is the analysis
        matrix ``x -> {<x, f_k>}``.
    """

    matrix: np.ndarray
    p: float = 2.0
    A: float = 1.0
    B: float = 1.0

    def __post_init__(self):
        matrix = np.atleast_2d(np.asarray(self.matrix))
        if matrix.ndim != 2 or matrix.size == 0:
            raise InvalidInputError("an atomic system needs a non-empty (K, D) matrix")
        if not np.all(np.isfinite(matrix)):
            raise InvalidInputError("system vectors must be finite")
        A = check_positive(self.A, "A")
        B = check_positive(self.B, "B")
        if A > B:
            raise InvalidInputError(f"need A <= B, got A={A}, B={B}")
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "p", float(self.p))

    @classmethod
    def from_vectors(cls, vectors, D, p=2.0, A=1.0, B=1.0):
        D = check_int(D, "D", minimum=1)
        rows = [v.to_dense(D) if isinstance(v, SeqVector) else _pad(v, D) for v in vectors]
        return cls(np.vstack(rows), p, A, B)

    @classmethod
    def canonical(cls, D, p=2.0):
        return cls(np.eye(check_int(D, "D", minimum=1)), p, 1.0, 1.0)

    @property
    def K(self):
        return self.matrix.shape[0]

    @property
    def D(self):
        return self.matrix.shape[1]


def _pad(values, D):
    values = np.asarray(values)[:D]
    return np.concatenate([values, np.zeros(D - values.size, values.dtype)])


def perturbed_bounds(A, B, epsilon):
    """``(A / (1 + eps B), B / (1 - eps B))``, defined for ``0 < eps < 1/B``.

    Examples
    --------
    >>> perturbed_bounds(1.0, 1.0, 0.5)
    (0.6666666666666666, 2.0)
    """
    A = check_positive(A, "A")
    B = check_positive(B, "B")
    epsilon = check_positive(epsilon, "epsilon", strict=False)
    if A > B:
        raise InvalidInputError(f"need A <= B, got A={A}, B={B}")
    if not epsilon * B < 1.0:
        raise PreconditionError(f"epsilon={epsilon:g} must be below 1/B={1.0 / B:g}")
    return A / (1.0 + epsilon * B), B / (1.0 - epsilon * B)


def conjugate_exponent(p):
    p = float(p)
    if p < 1:
        raise InvalidInputError(f"p must be >= 1, got {p}")
    return math.inf if p == 1 else p / (p - 1.0)


def closeness_norm(errors, p):
    """``||{errors}||_q`` with ``q`` conjugate to ``p`` (the sup when ``p = 1``)."""
    errors = np.abs(np.asarray(errors, dtype=float))
    if errors.size == 0:
        return 0.0
    q = conjugate_exponent(p)
    if math.isinf(q):
        return float(errors.max())
    top = errors.max()
    if top == 0:
        return 0.0
    return float(top * np.sum((errors / top) ** q) ** (1.0 / q))


def check_closeness(family, suborbit_errors, p, epsilon, B):
    """Whether the suborbit system is close enough to keep the decomposition.

    By Hoelder, ``||sum c_k (f_k - g_k)|| <= ||{errors}||_q ||c||_p``, so the
    condition is ``||{errors}||_q <= eps`` together with ``eps < 1/B``.
    """
    errors = list(suborbit_errors)
    if family is not None and len(family) != len(errors):
        raise InvalidInputError(f"{len(errors)} errors for a family of {len(family)}")
    epsilon = check_positive(epsilon, "epsilon")
    B = check_positive(B, "B")
    return closeness_norm(errors, p) <= epsilon and epsilon * B < 1.0


def frame_bounds_p2(system):
    """Extreme singular values ``(sigma_min, sigma_max)`` of the analysis matrix.

    They are the best constants in ``A ||x|| <= ||{<x, f_k>}||_2 <= B ||x||``.
    A rank-deficient system reports ``A = 0``.
    """
    if system.p != 2.0:
        raise InvalidInputError("frame bounds are only computed for p = 2")
    sv = np.linalg.svd(system.matrix, compute_uv=False)
    B = float(sv.max())
    A = float(sv.min()) if system.K >= system.D and is_complete(system) else 0.0
    return A, B


def is_complete(system, rtol=1e-10):
    """Whether the truncated system spans all ``D`` coordinates (full column rank)."""
    sv = np.linalg.svd(system.matrix, compute_uv=False)
    return bool(system.K >= system.D and sv.min() > rtol * sv.max())


def suborbit_system(orbit, D, p=2.0, A=1.0, B=1.0):
    """The vectors ``T^{alpha(k)} phi`` truncated to ``D`` coordinates."""
    rows = [evaluate_suborbit(orbit, k).to_dense(D) for k in range(1, orbit.K + 1)]
    return AtomicSystem(np.vstack(rows), p, A, B)


@dataclass(frozen=True, eq=False)
class DecompositionRun:
    run: object
    base: AtomicSystem
    perturbed: AtomicSystem
    epsilon: float
    closeness: bool
    envelope: tuple
    measured: tuple | None
    complete: bool | None

    @property
    def within_envelope(self):
        if self.measured is None:
            return None
        lo, hi = self.envelope
        tol = 1e-12
        return lo - tol <= self.measured[0] and self.measured[1] <= hi + tol


def run_decomposition_pipeline(D=20, epsilon=0.5, p=2.0, lam=4.0, jobs=1):
    """Approximate the canonical basis of ``l^p`` by a suborbit and check the envelope.

    The schedule uses ``eps_j = epsilon 2^{-j}``, so the errors' ``l^q``
    norm stays below ``epsilon`` and the perturbed bounds apply.
    """
    D = check_int(D, "D", minimum=1)
    epsilon = check_positive(epsilon, "epsilon")
    base = AtomicSystem.canonical(D, p)
    envelope = perturbed_bounds(base.A, base.B, epsilon)
    space = WeightedLpSpace(p)
    run = run_finite_pipeline(space, canonical_family(D), lam, eps_schedule("plain", epsilon),
                              jobs=jobs)
    perturbed = suborbit_system(run.orbit, D, p, *envelope)
    closeness = check_closeness(canonical_family(D), run.report.errors, p, epsilon, base.B)
    measured = complete = None
    if p == 2.0:
        measured = frame_bounds_p2(perturbed)
        complete = is_complete(perturbed)
    return DecompositionRun(run, base, perturbed, epsilon, closeness, envelope, measured,
                            complete)


__all__ = [
    "AtomicSystem", "DecompositionRun", "check_closeness", "closeness_norm",
    "conjugate_exponent", "frame_bounds_p2", "is_complete", "perturbed_bounds",
    "run_decomposition_pipeline", "suborbit_system",
]


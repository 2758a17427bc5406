"""Generators for the sequence families fed to the constructions."""

import math

import numpy as np

from ._validation import check_int, check_positive, resolve_random_state
from .spaces import DecayProfile, SeqVector, norm


def canonical_family(K):
    """``f_k = e_k`` for ``k = 1..K``."""
    K = check_int(K, "K", minimum=1)
    return [SeqVector.basis(k) for k in range(1, K + 1)]


def localized_family(K, C=1.0, beta=2.0, threshold=1e-16):
    """``(f_k)_j = C exp(-beta |j - k|)``, dropping entries below ``threshold``.

    Each member carries the envelope as a decay certificate centred at ``k``.
    """
    K = check_int(K, "K", minimum=1)
    C = check_positive(C, "C")
    beta = check_positive(beta, "beta")
    threshold = check_positive(threshold, "threshold")
    reach = max(0, math.floor(math.log(C / threshold) / beta)) if C > threshold else -1
    family = []
    for k in range(1, K + 1):
        coeffs = {j: C * math.exp(-beta * abs(j - k))
                  for j in range(max(1, k - reach), k + reach + 1)}
        family.append(SeqVector(coeffs, decay=DecayProfile(C, beta, k)))
    return family


def random_finite_family(K, max_support=5, random_state=None, complex_values=False):
    """``K`` random vectors, ``f_k`` supported in ``1..N(k)`` with ``N(k) <= max_support``."""
    K = check_int(K, "K", minimum=1)
    max_support = check_int(max_support, "max_support", minimum=1)
    rng = resolve_random_state(random_state)
    family = []
    for _ in range(K):
        size = rng.randint(1, max_support + 1)
        values = rng.standard_normal(size)
        if complex_values:
            values = values + 1j * rng.standard_normal(size)
        family.append(SeqVector.from_dense(values))
    return family


def supports(family):
    """``N(k)``: the largest index carrying a coefficient (at least 1)."""
    return [max(1, int(f.max_index)) for f in family]


def norms(space, family):
    return [norm(space, f) for f in family]


def from_dense_rows(rows):
    """One :class:`SeqVector` per row of a 2-D array (column ``i`` is index ``i+1``)."""
    return [SeqVector.from_dense(row) for row in np.atleast_2d(rows)]

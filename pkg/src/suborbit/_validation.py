"""Small argument checks shared by the public functions and estimators."""

import math
import numbers
import os

from sklearn.utils import check_random_state

from .exceptions import InvalidInputError

SEED_ENV = "SUBORBIT_SEED"


def resolve_random_state(random_state=None):
    """Like :func:`sklearn.utils.check_random_state`, honouring ``SUBORBIT_SEED``."""
    if random_state is None and os.environ.get(SEED_ENV):
        random_state = int(os.environ[SEED_ENV])
    return check_random_state(random_state)


def check_positive(value, name, strict=True):
    if not isinstance(value, numbers.Real) or not math.isfinite(value):
        raise InvalidInputError(f"{name} must be a finite real number, got {value!r}")
    if value < 0 or (strict and value == 0):
        raise InvalidInputError(f"{name} must be {'positive' if strict else 'nonnegative'}, "
                                f"got {value}")
    return float(value)


def check_int(value, name, minimum=None):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        if isinstance(value, numbers.Real) and float(value).is_integer():
            value = int(value)
        else:
            raise InvalidInputError(f"{name} must be an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise InvalidInputError(f"{name} must be >= {minimum}, got {value}")
    return int(value)

"""Discretized weighted ``L^p`` on a half-line grid and the translation pipeline.

A :class:`GridFunction` is piecewise constant on cells ``[i h, (i+1) h)`` with
``h = 1/q`` and value sampled at the cell midpoint.  Integer translations are
then exact cell shifts, the half-line truncation ``chi_[0,inf)`` is exact, and
the norm

.. math:: \\|f\\| = \\Big(h \\sum_i |f_i|^p w(x_i)\\Big)^{1/p}

is the midpoint-rule quadrature of ``int |f|^p w``.  It is exact for
piecewise-constant ``|f|^p w`` on the grid and has error at most
``(h/2) TV(|f|^p w)`` for piecewise-C^1 integrands.
"""

from __future__ import annotations

import csv
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import _scaling
from ._validation import check_int, check_positive
from .construct import ErrorReport, ErrorRow
from .exceptions import (
    ContractionError,
    GridMismatchError,
    InvalidIndexError,
    InvalidInputError,
    NoCertificateError,
    PreconditionError,
)
from .schedule import schedule_function

_GRID_TOL = 1e-9


class GridSnapWarning(UserWarning):
    """A cutoff was not a grid point and has been moved down to one."""


# -- weights ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ModerateWeight:
    """A weight ``w`` on the real line with a submultiplicative majorant ``m``.

    ``w(x + y) <= m(x) w(y)`` for all ``x, y``, which bounds translations:
    ``||T_a|| <= m(a)^{1/p}`` on ``L^p_w``.

    Kinds
    -----
    constant
        ``w = c``, ``m = 1``.
    exponential
        ``w = exp(gamma x)``, ``m(x) = exp(gamma x)``.
    polynomial
        ``w = (1 + |x|)^s``, ``m(x) = (1 + |x|)^{|s|}``.
    """

    kind: str = "constant"
    c: float = 1.0
    gamma: float = 0.0
    s: float = 0.0

    def __post_init__(self):
        if self.kind not in ("constant", "exponential", "polynomial"):
            raise InvalidInputError(f"unknown weight kind {self.kind!r}")
        check_positive(self.c, "c")
        for name in ("gamma", "s"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise InvalidInputError(f"{name} must be finite, got {value}")

    @classmethod
    def constant(cls, c=1.0):
        return cls("constant", c=c)

    @classmethod
    def exponential(cls, gamma):
        return cls("exponential", gamma=gamma)

    @classmethod
    def polynomial(cls, s):
        return cls("polynomial", s=s)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "constant":
            return np.full_like(x, self.c)
        if self.kind == "exponential":
            return np.exp(self.gamma * x)
        return (1.0 + np.abs(x)) ** self.s

    def majorant(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "constant":
            return np.ones_like(x)
        if self.kind == "exponential":
            return np.exp(self.gamma * x)
        return (1.0 + np.abs(x)) ** abs(self.s)

    def translation_bound(self, a, p):
        """``m(a)^{1/p}``, an upper bound for ``||T_a||`` on ``L^p_w``."""
        return float(self.majorant(a)) ** (1.0 / p)

    def check_moderate(self, xs, ys, rtol=1e-12):
        """Sampled check of ``w(x+y) <= m(x) w(y)`` over all pairs."""
        x, y = np.meshgrid(np.asarray(xs, float), np.asarray(ys, float), indexing="ij")
        return bool(np.all(self(x + y) <= self.majorant(x) * self(y) * (1.0 + rtol)))

    def to_dict(self):
        return {"kind": self.kind, "c": self.c, "gamma": self.gamma, "s": self.s}

    @classmethod
    def from_dict(cls, data):
        return cls(**{k: data[k] for k in ("kind", "c", "gamma", "s") if k in data})


# -- grid functions --------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GridFunction:
    """Samples of a function on ``[0, L)`` with cells of width ``1/q``.

    ``scale_base ** scale_exponent`` multiplies every value; it is how
    ``T^n`` and ``S^n`` carry ``lambda**(+-n)``.  ``lost_mass`` accumulates the
    norms of whatever was pushed past ``L`` and discarded.
    """

    values: np.ndarray
    q: int
    p: float = 1.0
    weight: ModerateWeight = field(default_factory=ModerateWeight)
    scale_base: float = 1.0
    scale_exponent: int = 0
    lost_mass: float = 0.0

    def __post_init__(self):
        q = check_int(self.q, "q", minimum=1)
        values = np.asarray(self.values)
        if values.ndim != 1:
            raise InvalidInputError("grid values must be one-dimensional")
        if not np.iscomplexobj(values):
            values = values.astype(float)
        if not np.all(np.isfinite(values)):
            raise InvalidInputError("grid values must be finite")
        p = float(self.p)
        if not 1.0 <= p < math.inf:
            raise InvalidInputError(f"p must satisfy 1 <= p < inf, got {p}")
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "scale_exponent", check_int(self.scale_exponent, "exponent"))

    @classmethod
    def from_callable(cls, func, L, q, p=1.0, weight=None):
        """Sample ``func`` at the cell midpoints of ``[0, L)``."""
        q = check_int(q, "q", minimum=1)
        n = _cells(L, q)
        x = (np.arange(n) + 0.5) / q
        return cls(np.asarray(func(x)), q, p, weight or ModerateWeight())

    @property
    def h(self):
        return 1.0 / self.q

    @property
    def n_cells(self):
        return self.values.size

    @property
    def L(self):
        return self.n_cells / self.q

    @property
    def x(self):
        """Cell midpoints, where the values are sampled."""
        return (np.arange(self.n_cells) + 0.5) / self.q

    @property
    def is_complex(self):
        return np.iscomplexobj(self.values)

    def materialized(self):
        """Values with the carried scale folded in (overflow-safe)."""
        if self.scale_exponent == 0:
            return self
        vals = _scaling.apply_factor(self.values, self.scale_base, self.scale_exponent)
        return replace(self, values=vals, scale_base=1.0, scale_exponent=0)

    def samples(self):
        return self.materialized().values

    def padded(self, L):
        """Extend the domain to ``[0, L)`` with zeros."""
        n = _cells(L, self.q)
        if n < self.n_cells:
            raise InvalidInputError(f"cannot pad to L={L} below current L={self.L}")
        vals = np.concatenate([self.values, np.zeros(n - self.n_cells, self.values.dtype)])
        return replace(self, values=vals)

    def modulated(self, freq):
        """``E_freq f(x) = exp(2 pi i freq x) f(x)`` sampled at the midpoints."""
        return replace(self, values=self.values * np.exp(2j * np.pi * freq * self.x))

    def __sub__(self, other):
        _check_compatible(self, other)
        n = max(self.n_cells, other.n_cells)
        a = _padded_values(self.samples(), n)
        b = _padded_values(other.samples(), n)
        return replace(self, values=a - b, scale_base=1.0, scale_exponent=0,
                       lost_mass=self.lost_mass + other.lost_mass)


def _cells(L, q):
    n = L * q
    if not math.isfinite(n) or n < 0 or abs(n - round(n)) > _GRID_TOL:
        raise GridMismatchError(f"L={L} is not a whole number of cells of width 1/{q}")
    return int(round(n))


def _padded_values(values, n):
    if values.size == n:
        return values
    return np.concatenate([values, np.zeros(n - values.size, values.dtype)])


def _check_compatible(f, g):
    if f.q != g.q or f.p != g.p or f.weight != g.weight:
        raise InvalidInputError("grid functions live on different grids or spaces")


def _cell_offset(f, a, name="cutoff"):
    """Index of the grid point ``a`` (snapping down with a warning if needed)."""
    if a == -math.inf:
        return 0, False
    pos = a * f.q
    snapped = math.floor(pos + _GRID_TOL)
    off_grid = abs(pos - snapped) > _GRID_TOL
    if off_grid:
        warnings.warn(f"{name} {a} is not a grid point; snapped down to {snapped / f.q}",
                      GridSnapWarning, stacklevel=3)
    return max(snapped, 0), off_grid


def _weighted_powers(f):
    return np.abs(f.values) ** f.p * f.weight(f.x)


def _raw_norm(f, powers, start):
    total = f.h * float(np.sum(powers[start:]))
    return total ** (1.0 / f.p)


def _with_scale(f, raw):
    if raw == 0.0:
        return 0.0
    lf = _scaling.log_factor(f.scale_base, f.scale_exponent)
    return math.exp(math.log(raw) + lf) if lf else raw


def lp_norm(f, start=0.0):
    """``(int_start^L |f|^p w)^{1/p}`` by the midpoint rule.

    ``start`` must be a grid point (``-inf`` means 0); other values are
    snapped down and a :class:`GridSnapWarning` is issued.
    """
    i0, _ = _cell_offset(f, start)
    if i0 >= f.n_cells:
        return 0.0
    return _with_scale(f, _raw_norm(f, _weighted_powers(f), i0))


def tail_norms(f):
    """``lp_norm(f, i h)`` for every grid point ``i h``, ``i = 0..n_cells``."""
    powers = _weighted_powers(f)
    sums = np.concatenate([np.cumsum(powers[::-1])[::-1], [0.0]])
    raw = (f.h * sums) ** (1.0 / f.p)
    lf = _scaling.log_factor(f.scale_base, f.scale_exponent)
    if lf == 0:
        return raw
    with np.errstate(divide="ignore"):
        return np.exp(np.log(raw) + lf)


def quadrature_allowance(f):
    """Bound on ``|int |f|^p w - h sum |f_i|^p w_i|^{1/p}`` for piecewise-C^1 integrands.

    Uses the discrete total variation of the sampled integrand as a proxy for
    its variation, so the estimate is ``(h/2 * TV)^{1/p}``.
    """
    m = f.materialized()
    integrand = _weighted_powers(m)
    if integrand.size < 2:
        return 0.0
    tv = float(np.sum(np.abs(np.diff(integrand))))
    return (0.5 * m.h * tv) ** (1.0 / m.p)


def _shift_cells(f, cells):
    """Move values ``cells`` to the right (left when negative).

    Returns ``(new_values, dropped_right, dropped_left)``; the array keeps its
    length.
    """
    vals = f.values
    n = vals.size
    out = np.zeros_like(vals)
    if cells >= 0:
        keep = max(n - cells, 0)
        out[cells:cells + keep] = vals[:keep]
        return out, vals[keep:], vals[:0]
    cells = -cells
    keep = max(n - cells, 0)
    out[:keep] = vals[cells:cells + keep]
    return out, vals[:0], vals[:min(cells, n)]


def _dropped_norm(f, dropped, first_index):
    if dropped.size == 0 or not np.any(dropped):
        return 0.0
    x = (first_index + np.arange(dropped.size) + 0.5) / f.q
    raw = (f.h * float(np.sum(np.abs(dropped) ** f.p * f.weight(x)))) ** (1.0 / f.p)
    return _with_scale(f, raw)


def translate(f, n):
    """``T_n f(x) = f(x - n)`` for integer ``n``, keeping the domain ``[0, L)``.

    Anything moved outside ``[0, L)`` is dropped and its norm added to
    ``lost_mass``.
    """
    n = check_int(n, "n")
    if n == 0:
        return f
    cells = n * f.q
    vals, right, left = _shift_cells(f, cells)
    lost = _dropped_norm(f, right, f.n_cells) + _dropped_norm(f, left, -min(-cells, f.n_cells))
    return replace(f, values=vals, lost_mass=f.lost_mass + lost)


def _rescaled(f, base, exponent):
    if f.scale_exponent != 0 and f.scale_base != base:
        f = f.materialized()
    total = f.scale_exponent + exponent
    return replace(f, scale_base=base if total else 1.0, scale_exponent=total)


def apply_T_func(f, lam, n):
    """``T^n f = lam^n (T_{-n} f) chi_[0,inf)`` with ``lam^n`` carried as an exponent."""
    lam = check_positive(lam, "lambda")
    n = check_int(n, "n", minimum=0)
    if n == 0:
        return f
    vals, _, _ = _shift_cells(f, -n * f.q)
    return _rescaled(replace(f, values=vals), lam, n)


def apply_S_func(f, lam, n):
    """``S^n f = lam^{-n} T_n f``; mass pushed past ``L`` is recorded in ``lost_mass``."""
    lam = check_positive(lam, "lambda")
    n = check_int(n, "n", minimum=0)
    if n == 0:
        return f
    return _rescaled(translate(f, n), lam, -n)


# -- generators and CSV ----------------------------------------------------------------

def exponential(L, q, rate=1.0, p=1.0, weight=None):
    """``exp(-rate x) chi_[0,inf)`` on ``[0, L)``."""
    rate = check_positive(rate, "rate")
    return GridFunction.from_callable(lambda x: np.exp(-rate * x), L, q, p, weight)


def characteristic(start, stop, L, q, p=1.0, weight=None):
    """``chi_[start, stop)`` on ``[0, L)``; the endpoints should be grid points."""
    return GridFunction.from_callable(lambda x: ((x >= start) & (x < stop)).astype(float),
                                      L, q, p, weight)


def truncated_gaussian(L, q, center=0.0, sigma=1.0, p=1.0, weight=None):
    """``exp(-(x - center)^2 / (2 sigma^2))`` restricted to ``[0, L)``."""
    sigma = check_positive(sigma, "sigma")
    return GridFunction.from_callable(
        lambda x: np.exp(-0.5 * ((x - center) / sigma) ** 2), L, q, p, weight)


GENERATORS = {
    "exponential": exponential,
    "characteristic": characteristic,
    "gaussian": truncated_gaussian,
}


def write_csv(f, path):
    """Write ``x, re, im`` rows at the cell midpoints (17 significant digits)."""
    vals = f.samples()
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["x", "re", "im"])
        for x, v in zip(f.x, vals):
            v = complex(v)
            writer.writerow([format(x, ".17g"), format(v.real, ".17g"), format(v.imag, ".17g")])


def read_csv(path, p=1.0, weight=None):
    """Load a grid function from ``x, re, im`` rows.

    ``x`` must be uniformly spaced with step ``1/q`` and start at ``0`` or at
    the first midpoint ``h/2``.
    """
    with open(path, newline="") as handle:
        rows = list(csv.DictReader(handle))
    if not rows or not {"x", "re", "im"} <= set(rows[0]):
        raise InvalidInputError(f"{path}: expected columns x, re, im")
    x = np.array([float(r["x"]) for r in rows])
    values = np.array([float(r["re"]) + 1j * float(r["im"]) for r in rows])
    if x.size < 2:
        raise InvalidInputError(f"{path}: need at least two samples")
    step = x[1] - x[0]
    q = round(1.0 / step) if step > 0 else 0
    if q < 1 or abs(1.0 / q - step) > 1e-9 or not np.allclose(np.diff(x), step, atol=1e-9):
        raise GridMismatchError(f"{path}: x is not a uniform grid with step 1/q")
    if not (abs(x[0]) < 1e-9 or abs(x[0] - 0.5 / q) < 1e-9):
        raise GridMismatchError(f"{path}: grid must start at 0 or at the first midpoint")
    if not np.any(values.imag):
        values = values.real
    return GridFunction(values, q, p, weight or ModerateWeight())


# -- tail certificates -----------------------------------------------------------------

@dataclass(frozen=True)
class TailCertificate:
    """``lp_norm(g, d) <= C mu^{-d}`` for every grid cutoff ``d >= d0``."""

    C: float
    mu: float
    d0: float
    zero_tail: bool = False

    def bound(self, d):
        return self.C * self.mu ** (-np.asarray(d, dtype=float))


@dataclass(frozen=True)
class DecayCertificate:
    """``||f chi_[a, inf)|| <= C mu^{-a}`` for every grid cutoff ``a >= a_k``."""

    C: float
    a: int
    mu: float

    def check(self, f, rtol=1e-12):
        """Exhaustive replay over the grid cutoffs of ``f``."""
        tails = tail_norms(f)
        i0 = min(self.a * f.q, f.n_cells)
        cut = np.arange(i0, f.n_cells + 1) / f.q
        bound = self.C * np.exp(-cut * math.log(self.mu))
        return bool(np.all(tails[i0:] <= bound * (1.0 + rtol)))


def _tail_grid(g, d0):
    tails = tail_norms(g)
    i0, _ = _cell_offset(g, d0, "d0")
    cut = np.arange(tails.size) / g.q
    return tails, cut, min(i0, tails.size - 1)


def certify_tail(g, mu, d0):
    """Smallest ``C`` with ``lp_norm(g, d) <= C mu^{-d}`` at every grid ``d >= d0``."""
    mu = check_positive(mu, "mu")
    if mu <= 1:
        raise InvalidInputError(f"mu must exceed 1, got {mu}")
    tails, cut, i0 = _tail_grid(g, d0)
    tails, cut = tails[i0:], cut[i0:]
    positive = tails > 0
    if not np.any(positive):
        return TailCertificate(np.finfo(float).tiny, mu, d0, zero_tail=True)
    logs = np.log(tails[positive]) + cut[positive] * math.log(mu)
    C = math.exp(float(np.max(logs))) * (1.0 + 1e-12)
    return TailCertificate(C, mu, d0)


def fit_tail_certificate(g, d0=0.0, margin=None):
    """Fit ``lp_norm(g, d) ~ C mu^{-d}`` and certify it on the grid.

    ``mu`` comes from a least-squares fit of ``log tail(d)`` over the grid
    cutoffs in ``[d0, L - margin]`` (``margin`` defaults to ``L/4``); ``C`` is
    then raised until the bound holds at every grid cutoff ``d >= d0``.  A
    tail that vanishes beyond ``d0`` gives ``C`` = the smallest positive
    double and ``zero_tail=True``.
    """
    margin = 0.25 * g.L if margin is None else check_positive(margin, "margin", strict=False)
    tails, cut, i0 = _tail_grid(g, d0)
    hi = int(math.floor((g.L - margin) * g.q + _GRID_TOL))
    sel = slice(i0, max(hi + 1, i0))
    t, d = tails[sel], cut[sel]
    positive = t > 0
    if not np.any(tails[i0:] > 0):
        return TailCertificate(np.finfo(float).tiny, math.e, d0, zero_tail=True)
    if np.count_nonzero(positive) < 2:
        raise NoCertificateError("fewer than two positive tail samples in the fitting window")
    slope = np.polyfit(d[positive], np.log(t[positive]), 1)[0]
    if not slope < 0:
        raise NoCertificateError(f"tail does not decay beyond d0={d0} (fitted slope {slope:g})")
    return certify_tail(g, math.exp(-slope), d0)


# -- half Gabor systems ----------------------------------------------------------------

def snake_indices(M_max, n_max):
    """``(m, n)`` pairs column by column; even columns ascend in ``m``, odd ones descend."""
    M_max = check_int(M_max, "M_max", minimum=0)
    n_max = check_int(n_max, "n_max", minimum=0)
    ms = list(range(-M_max, M_max + 1))
    return [(m, n) for n in range(n_max + 1) for m in (ms if n % 2 == 0 else ms[::-1])]


@dataclass(frozen=True, eq=False)
class FunctionFamily:
    """Grid functions on a common grid, each with a decay certificate."""

    members: tuple
    certificates: tuple
    labels: tuple = ()

    def __len__(self):
        return len(self.members)

    def __getitem__(self, k):
        return self.members[k]


def gabor_half_system(g, a, b, M_max, n_max, certificate=None, d0=0.0, K=None):
    """The half Gabor system ``E_{mb} T_{na} g`` in snake order, with certificates.

    Member ``k`` (1-based) gets ``C_k = C mu^{k a}`` and
    ``a_k = max(0, ceil(d0 + k a))`` from the tail certificate of ``g``, which
    is fitted when not supplied.  The grid is extended by ``n_max * a`` so no
    translate loses mass.
    """
    a = check_positive(a, "a")
    b = check_positive(b, "b", strict=False)
    if abs(a * g.q - round(a * g.q)) > _GRID_TOL:
        raise GridMismatchError(f"a={a} is not a whole number of cells of width 1/{g.q}")
    shift_cells = int(round(a * g.q))
    cert = certificate or fit_tail_certificate(g, d0)
    pairs = snake_indices(M_max, n_max)
    if K is not None:
        pairs = pairs[:check_int(K, "K", minimum=1)]
    base = g.materialized()
    base = base.padded((base.n_cells + n_max * shift_cells) / g.q)
    members, certs = [], []
    for k, (m, n) in enumerate(pairs, start=1):
        vals, _, _ = _shift_cells(base, n * shift_cells)
        f = replace(base, values=vals)
        if m:
            f = f.modulated(m * b)
        members.append(f)
        C_k = math.exp(math.log(cert.C) + k * a * math.log(cert.mu))
        certs.append(DecayCertificate(C_k, max(0, math.ceil(cert.d0 + k * a - _GRID_TOL)),
                                      cert.mu))
    return FunctionFamily(tuple(members), tuple(certs), tuple(pairs))


def certify_family(functions, d0=0.0, mu=None, margin=None):
    """Common-``mu`` certificates for arbitrary half-line functions.

    ``mu`` defaults to the smallest fitted rate over the family.
    """
    functions = list(functions)
    if mu is None:
        fitted = [fit_tail_certificate(f, d0, margin) for f in functions]
        mu = min(c.mu for c in fitted if not c.zero_tail) if any(
            not c.zero_tail for c in fitted) else math.e
    certs = []
    for f in functions:
        c = certify_tail(f, mu, d0)
        certs.append(DecayCertificate(c.C, max(0, math.ceil(d0 - _GRID_TOL)), mu))
    return FunctionFamily(tuple(functions), tuple(certs))


# -- the translation pipeline ----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FunctionOrbit:
    """Lazy ``phi = sum_{j<=N} S^{alpha(j)} f_j`` on an extended grid."""

    family: FunctionFamily
    schedule: object
    lam: float
    mu: float
    norm_S: float
    norm_Tminus1: float
    truncation_index: int

    @property
    def K(self):
        return len(self.family)

    @property
    def n_cells(self):
        first = self.family.members[0]
        return max(f.n_cells for f in self.family.members) + self.schedule[self.K] * first.q

    def _aligned(self, f):
        return replace(f, values=_padded_values(f.materialized().values, self.n_cells))

    def evaluate(self, k):
        """``T^{alpha(k)} phi`` with each ``lam`` power applied in log form."""
        if int(k) != k or not 1 <= k <= self.K:
            raise InvalidIndexError(f"k must lie in 1..{self.K}, got {k}")
        alpha_k = self.schedule[k]
        first = self.family.members[0]
        is_complex = any(f.is_complex for f in self.family.members)
        total = np.zeros(self.n_cells, dtype=complex if is_complex else float)
        for j in range(1, self.truncation_index + 1):
            d = alpha_k - self.schedule[j]
            f = self._aligned(self.family.members[j - 1])
            vals, _, _ = _shift_cells(f, -d * f.q)
            total += _scaling.apply_factor(vals, self.lam, d)
        return replace(first, values=total, scale_base=1.0, scale_exponent=0, lost_mass=0.0)

    def allowance(self, k):
        total = 0.0
        for j in range(max(self.truncation_index + 1, k), self.K + 1):
            size = lp_norm(self.family.members[j - 1])
            if size > 0:
                total += math.exp((self.schedule[j] - self.schedule[k]) * math.log(self.norm_S)
                                  + math.log(size))
        return total

    def row(self, k):
        f_k = self._aligned(self.family.members[k - 1])
        diff = f_k - self.evaluate(k)
        return ErrorRow(k, self.schedule[k], lp_norm(diff), self.schedule.eps.tail(k),
                        self.allowance(k) + diff.lost_mass, quadrature_allowance(diff))

    def verify(self, jobs=1):
        ks = range(1, self.K + 1)
        if jobs and jobs > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                rows = list(pool.map(self.row, ks))
        else:
            rows = [self.row(k) for k in ks]
        return ErrorReport(tuple(rows))


def build_function_orbit(family, lam=None, mu=None, eps=None, K=None, N=None):
    """Schedule a certified family and return the lazy orbit.

    ``lam`` defaults to ``1.5 ||T_1||`` (using the weight's bound); ``mu``
    defaults to the smallest certificate rate and may not exceed it.
    """
    from .schedule import eps_schedule

    if not isinstance(family, FunctionFamily):
        raise InvalidInputError("family must be a FunctionFamily with certificates")
    K = len(family) if K is None else check_int(K, "K", minimum=1)
    if K > len(family):
        raise InvalidInputError(f"K={K} exceeds the family size {len(family)}")
    family = FunctionFamily(family.members[:K], family.certificates[:K], family.labels[:K])
    first = family.members[0]
    for f in family.members[1:]:
        _check_compatible(first, f)
    p, weight = first.p, first.weight
    norm_T1 = weight.translation_bound(1.0, p)
    norm_Tm1 = weight.translation_bound(-1.0, p)
    lam = 1.5 * norm_T1 if lam is None else check_positive(lam, "lambda")
    if not lam > norm_T1:
        raise ContractionError(
            f"lambda={lam:g} must exceed ||T_1||<={norm_T1:g}; otherwise S is not a contraction")
    cert_mu = min(c.mu for c in family.certificates)
    mu = cert_mu if mu is None else check_positive(mu, "mu")
    if mu > cert_mu * (1.0 + 1e-12):
        raise PreconditionError(f"mu={mu:g} exceeds the certified decay rate {cert_mu:g}")
    # certificates at rate cert_mu remain valid at any smaller mu
    C_ks = [c.C * math.exp(c.a * (math.log(mu) - math.log(c.mu))) for c in family.certificates]
    eps = eps_schedule("plain", 1.0) if eps is None else eps
    schedule = schedule_function([lp_norm(f) for f in family.members], norm_T1 / lam, lam,
                                 norm_Tm1, mu, [c.a for c in family.certificates], C_ks, eps, K)
    N = K if N is None else check_int(N, "N", minimum=0)
    if N > K:
        raise InvalidInputError(f"truncation index N={N} exceeds K={K}")
    return FunctionOrbit(family, schedule, lam, mu, norm_T1 / lam, norm_Tm1, N)


def run_function_pipeline(family, lam=None, mu=None, eps=None, K=None, N=None, jobs=1):
    """Schedule, build and verify; returns the :class:`ErrorReport`.

    The report's ``quadrature`` column bounds the gap between the grid norm
    and the continuous integral for each error function.
    """
    return build_function_orbit(family, lam, mu, eps, K, N).verify(jobs)

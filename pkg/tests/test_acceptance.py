"""The nine acceptance criteria, each printing one PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the verdict lines
inline; they are written past pytest's capture either way.
"""

import math
import time

import numpy as np
import pytest

import oracles
from suborbit import (
    WeightedLpSpace,
    WeightSequence,
    eps_schedule,
    evaluate_suborbit,
    evaluate_suborbit_naive,
    fit_tail_certificate,
    gabor_half_system,
    norm,
    perturbed_bounds,
    run_decomposition_pipeline,
    run_finite_pipeline,
    run_localized_pipeline,
    sample_priesz_bounds,
    schedule_finite,
    schedule_function,
    schedule_localized,
    shift_norms,
    verify_eps_close,
)
from suborbit.construct import eps_close_sums
from suborbit.families import canonical_family, localized_family, random_finite_family
from suborbit.function_space import build_function_orbit, exponential
from suborbit.shifts import sampled_shift_norms

FLOAT_NOISE = 1e-12


@pytest.fixture
def verdict(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\nacceptance criterion {number}: {'PASS' if ok else 'FAIL'} ({detail})")
        assert ok, detail
    return emit


def timed(func):
    start = time.perf_counter()
    result = func()
    return result, time.perf_counter() - start


def canonical_run():
    return run_finite_pipeline(WeightedLpSpace(2.0), canonical_family(12), 4.0,
                               eps_schedule("plain", 1.0), N=12)


def localized_run():
    return run_localized_pipeline(WeightedLpSpace(2.0), localized_family(8, 1.0, 2.0, 1e-16),
                                  1.0, 2.0, math.e)


def gabor_orbit():
    g = exponential(40, 64, rate=1.0, p=1.0)
    certificate = fit_tail_certificate(g)
    family = gabor_half_system(g, 1.0, 1.0, M_max=2, n_max=1, certificate=certificate, K=10)
    return certificate, build_function_orbit(family)


def test_criterion_1_shift_norms(verdict):
    def check():
        space = WeightedLpSpace(1.0, WeightSequence.geometric(2.0))
        exact = shift_norms(space)
        sampled = sampled_shift_norms(space, 50, 300, random_state=0)
        # independent dense brute force: ||v|| = sum |v_k| 2^k on coordinates 1..50
        rng = np.random.RandomState(1)
        w = 2.0 ** np.arange(1, 51)
        vecs = np.vstack([np.eye(50), rng.standard_normal((2000, 50))])
        base = np.abs(vecs) @ w
        left = np.abs(vecs[:, 1:]) @ w[:-1]
        right = np.abs(vecs[:, :-1]) @ w[1:]
        dense = (float(np.max(left / base)), float(np.max(right / base)))
        return exact, sampled, dense

    (exact, sampled, dense), elapsed = timed(check)
    ok = exact == (0.5, 2.0) and elapsed < 1.0
    for sup, formula in zip(sampled + dense, exact + exact):
        ok = ok and sup <= formula * (1 + FLOAT_NOISE) and formula - sup < 1e-3
    verdict(1, ok, f"norms {exact}, sampled {sampled}, dense {dense}, {elapsed:.3f}s")


def test_criterion_2_scaled_basis(verdict):
    rng = np.random.RandomState(2024)
    kinds = [lambda: WeightSequence.geometric(rng.uniform(0.3, 4.0)),
             lambda: WeightSequence.power(rng.uniform(-3.0, 3.0)),
             lambda: WeightSequence.constant(rng.uniform(0.1, 10.0))]
    worst = 0.0
    for i in range(20):
        space = WeightedLpSpace(rng.uniform(1.0, 6.0), kinds[i % 3](), "scaled")
        lo, hi = sample_priesz_bounds(space, 50, 40, random_state=rng)
        worst = max(worst, abs(lo - 1.0), abs(hi - 1.0))
    verdict(2, worst <= 1e-12, f"largest deviation from 1 over 20 spaces: {worst:.3g}")


def test_criterion_3_canonical_end_to_end(verdict):
    run, elapsed = timed(canonical_run)
    alphas_ok = run.schedule.alphas == tuple(k * (k + 1) // 2 for k in range(1, 13))
    errors = run.report.errors
    errors_ok = all(e <= 2.0 ** -k for k, e in enumerate(errors, start=1))
    no_allowance = all(row.allowance == 0.0 for row in run.report.rows)
    ok = alphas_ok and errors_ok and no_allowance and elapsed < 1.0
    verdict(3, ok, f"alpha {run.schedule.alphas[:4]}..., max error/2^-k "
                   f"{max(e * 2 ** k for k, e in enumerate(errors, start=1)):.3g}, "
                   f"{elapsed:.3f}s")


def test_criterion_4_eps_closeness(verdict):
    run = canonical_run()
    details, ok = [], True
    for p in (1, 2, 3):
        errors = np.asarray(run.report.errors)
        total = float(np.sum(errors ** p))
        limit = 1.0 / (2.0 ** p - 1.0)
        ok = ok and total <= limit * (1 + FLOAT_NOISE)
        ok = ok and verify_eps_close(run.report, p, 1.0)
        details.append(f"p={p}: {total:.3g} <= {limit:.3g}")
    space = WeightedLpSpace(2.0, WeightSequence.geometric(2.0))
    eps = eps_schedule("weighted", 1.0, space)
    weighted = run_finite_pipeline(space, canonical_family(12), eps=eps)
    lhs, rhs = eps_close_sums(weighted.report, 2, 1.0, "weighted", space)
    ok = ok and abs(eps.M - 1.0) <= FLOAT_NOISE and lhs <= rhs * (1 + FLOAT_NOISE)
    details.append(f"weighted M={eps.M:.12g}: {lhs:.3g} <= {rhs:.3g}")
    verdict(4, ok, "; ".join(details))


def test_criterion_5_localized_end_to_end(verdict):
    run, elapsed = timed(localized_run)
    replay = run.schedule.verify()
    within = all(row.actual_error <= row.bound for row in run.report.rows)
    ok = replay and within and elapsed < 5.0
    verdict(5, ok, f"alpha {run.schedule.alphas}, schedule replay {replay}, "
                   f"max ratio {run.report.max_ratio:.3g}, {elapsed:.3f}s")


def test_criterion_6_gabor(verdict):
    def check():
        certificate, orbit = gabor_orbit()
        return certificate, orbit, orbit.verify()

    (certificate, orbit, report), elapsed = timed(check)
    mu_dev = abs(certificate.mu - math.e) / math.e
    rows_ok = all(r.actual_error <= r.bound + r.quadrature for r in report.rows)
    quad_ok = all(r.quadrature <= 1e-2 * r.bound for r in report.rows)
    ok = len(report) == 10 and mu_dev <= 0.02 and rows_ok and quad_ok and elapsed < 30.0
    worst = max(r.quadrature / r.bound for r in report.rows)
    verdict(6, ok, f"mu={certificate.mu:.8g} (rel. dev. {mu_dev:.2g}), max "
                   f"quadrature/bound {worst:.2g}, max ratio {report.max_ratio:.3g}, "
                   f"{elapsed:.2f}s")


def test_criterion_7_stable_vs_naive(verdict):
    space = WeightedLpSpace(2.0)
    worst = 0.0
    for seed in range(100):
        K = 1 + seed % 5
        run = run_finite_pipeline(space, random_finite_family(K, 5, seed), 2.0)
        for k in range(1, K + 1):
            stable = evaluate_suborbit(run.orbit, k)
            naive = evaluate_suborbit_naive(run.orbit, k)
            scale = norm(space, naive)
            if scale > 0:
                worst = max(worst, norm(space, stable - naive) / scale)
    verdict(7, worst <= 1e-10, f"largest relative difference over 100 families: {worst:.3g}")


def test_criterion_8_decomposition_envelope(verdict):
    result, elapsed = timed(lambda: run_decomposition_pipeline(20, 0.5, 2.0))
    envelope_exact = perturbed_bounds(1.0, 1.0, 0.5) == (1.0 / 1.5, 2.0) == result.envelope
    A, B = result.measured
    ok = (envelope_exact and result.closeness and 2 / 3 <= A and B <= 2.0
          and result.complete and elapsed < 1.0)
    verdict(8, ok, f"envelope {result.envelope}, measured ({A:.6g}, {B:.6g}), complete "
                   f"{result.complete}, {elapsed:.3f}s")


def fixture_schedules():
    xd = math.sqrt(math.exp(-4) / (1 - math.exp(-4)))
    return {
        "finite canonical K=12": canonical_run().schedule,
        "finite random": schedule_finite([3, 1, 4, 1, 5], [0.7, 2.0, 1.1, 0.3, 1.9], 0.5,
                                         eps_schedule("plain", 0.2), 5),
        "localized unit norms K=6": schedule_localized(1.0, 2.0, math.e, 1 / math.e, 1.0,
                                                       [1.0] * 6, xd, eps_schedule(), 6),
        "localized K=8": localized_run().schedule,
        "function rho=2 K=8": schedule_function([1.0] * 8, 0.5, 2.0, 1.0, 4.0, [0] * 8,
                                                [1.0] * 8, eps_schedule(), 8),
        "gabor first 10": gabor_orbit()[1].schedule,
    }


def test_criterion_9_minimality(verdict):
    failures = []
    schedules = fixture_schedules()
    for name, schedule in schedules.items():
        if not schedule.verify():
            failures.append(f"{name}: replay fails")
        for k, violations in schedule.minimality_probe().items():
            if not violations:
                failures.append(f"{name}: alpha({k}) - 1 still feasible")
    # the brute-force oracle finds the same minimal schedule for the canonical fixture
    oracle = oracles.finite_schedule(range(1, 13), [1] * 12, 0.25, 1.0, 12)
    if oracle != schedules["finite canonical K=12"].alphas:
        failures.append("canonical schedule differs from the oracle")
    verdict(9, not failures, "; ".join(failures) or "every decrement of every alpha(k) "
                                                     "violates a defining inequality")

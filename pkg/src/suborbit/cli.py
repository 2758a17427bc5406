"""Command line entry point: ``suborbit <pipeline> --config <path>``.

The config is a TOML file.  Every pipeline writes ``schedule.csv`` (``k,
alpha_k, binding``), ``report.csv`` (one row per ``k``) and ``summary.txt``
into ``--out``.  Exit status is 0 when every check passes, 1 when a bound or
check fails and 2 when the config is invalid.
"""

from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
from pathlib import Path

from .construct import eps_close_sums, run_finite_pipeline, run_localized_pipeline
from .decomposition import run_decomposition_pipeline
from .exceptions import ConfigError, SuborbitError
from .families import canonical_family, localized_family, random_finite_family
from .function_space import (
    GENERATORS,
    ModerateWeight,
    build_function_orbit,
    certify_family,
    fit_tail_certificate,
    gabor_half_system,
    read_csv,
)
from .schedule import eps_schedule
from .spaces import SeqVector, WeightedLpSpace

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - exercised only on 3.10
    import tomli as tomllib

PIPELINES = ("finite", "localized", "function", "gabor", "decomposition")

log = logging.getLogger("suborbit")


def _fmt(x):
    return format(float(x), ".17g")


def load_config(path):
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        with path.open("rb") as handle:
            data = tomllib.load(handle)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    data["_base"] = path.parent
    return data


def _section(config, name):
    value = config.get(name, {})
    if not isinstance(value, dict):
        raise ConfigError(f"[{name}] must be a table")
    return value


def _resolve(config, relative):
    path = Path(relative)
    if not path.is_absolute():
        path = config["_base"] / path
    if not path.is_file():
        raise ConfigError(f"referenced file does not exist: {path}")
    return path


def _eps(config, space=None):
    section = _section(config, "eps")
    variant = section.get("variant", "plain")
    return eps_schedule(variant, float(section.get("epsilon", 1.0)),
                        None if variant == "plain" else space)


def _sequence_family(config, space):
    section = _section(config, "family")
    generator = section.get("generator", "canonical")
    K = section.get("K", 12)
    if generator == "canonical":
        return canonical_family(K)
    if generator == "localized":
        return localized_family(K, section.get("C", 1.0), section.get("beta", 2.0),
                                section.get("threshold", 1e-16))
    if generator == "random":
        return random_finite_family(K, section.get("max_support", 5), section.get("seed"))
    if generator == "file":
        path = _resolve(config, section.get("path", ""))
        with path.open(newline="") as handle:
            rows = [[float(x) for x in row] for row in csv.reader(handle) if row]
        if not rows:
            raise ConfigError(f"{path}: empty family file")
        return [SeqVector.from_dense(row) for row in rows]
    raise ConfigError(f"unknown family generator {generator!r}")


def _grid_function(config, spec):
    grid = _section(config, "grid")
    p = float(grid.get("p", 1.0))
    weight = ModerateWeight.from_dict(grid.get("weight", {"kind": "constant"}))
    if "path" in spec:
        return read_csv(_resolve(config, spec["path"]), p, weight)
    params = dict(spec)
    name = params.pop("generator", "exponential")
    if name not in GENERATORS:
        raise ConfigError(f"unknown function generator {name!r}; choose from {sorted(GENERATORS)}")
    try:
        return GENERATORS[name](L=grid.get("L", 40), q=grid.get("q", 64), p=p, weight=weight,
                                **params)
    except TypeError as exc:
        raise ConfigError(f"generator {name!r}: {exc}") from None


# -- pipelines -------------------------------------------------------------------------

class Outcome:
    def __init__(self, schedule, report, summary, passed):
        self.schedule = schedule
        self.report = report
        self.summary = summary
        self.passed = passed


def _sequence_summary(run, space):
    lhs, rhs = eps_close_sums(run.report, space.p, run.eps.epsilon, run.eps.variant, space)
    return {
        "lambda": _fmt(run.ops.lam),
        "norm_S": _fmt(run.ops.norm_S),
        "M": _fmt(run.eps.M),
        "variant": run.eps.variant,
        "eps_close_lhs": _fmt(lhs),
        "eps_close_rhs": _fmt(rhs),
        "eps_close": str(lhs <= rhs * (1 + 1e-12)).lower(),
        "max_ratio": _fmt(run.report.max_ratio),
        "schedule_verified": str(run.schedule.verify()).lower(),
    }


def run_finite(config, jobs, trunc):
    space = WeightedLpSpace.from_dict(_section(config, "space"))
    family = _sequence_family(config, space)
    run = run_finite_pipeline(space, family, _section(config, "operator").get("lambda"),
                              _eps(config, space), trunc, jobs)
    summary = _sequence_summary(run, space)
    return Outcome(run.schedule, run.report, summary,
                   run.report.passed and run.schedule.verify())


def run_localized(config, jobs, trunc):
    space = WeightedLpSpace.from_dict(_section(config, "space"))
    family = _sequence_family(config, space)
    section = _section(config, "family")
    operator = _section(config, "operator")
    run = run_localized_pipeline(
        space, family, section.get("C", 1.0), section.get("beta", 2.0), operator.get("lambda"),
        _eps(config, space), trunc, operator.get("B", 1.0), operator.get("xd_norm"),
        operator.get("include_n0", True), jobs)
    summary = _sequence_summary(run, space)
    return Outcome(run.schedule, run.report, summary,
                   run.report.passed and run.schedule.verify())


def _function_outcome(orbit, jobs):
    report = orbit.verify(jobs)
    summary = {
        "lambda": _fmt(orbit.lam),
        "mu": _fmt(orbit.mu),
        "norm_S": _fmt(orbit.norm_S),
        "M": _fmt(orbit.schedule.eps.M),
        "max_ratio": _fmt(report.max_ratio),
        "max_quadrature_over_bound": _fmt(max(r.quadrature / r.bound for r in report.rows)),
        "schedule_verified": str(orbit.schedule.verify()).lower(),
    }
    return Outcome(orbit.schedule, report, summary, report.passed and orbit.schedule.verify())


def run_function(config, jobs, trunc):
    members = config.get("functions")
    if not isinstance(members, list) or not members:
        raise ConfigError("the function pipeline needs a non-empty [[functions]] array")
    functions = [_grid_function(config, spec) for spec in members]
    n = max(f.n_cells for f in functions)
    functions = [f.padded(n / f.q) for f in functions]
    cert = _section(config, "certificate")
    family = certify_family(functions, cert.get("d0", 0.0), cert.get("mu"), cert.get("margin"))
    operator = _section(config, "operator")
    orbit = build_function_orbit(family, operator.get("lambda"), operator.get("mu"),
                                 _eps(config), N=trunc)
    return _function_outcome(orbit, jobs)


def run_gabor(config, jobs, trunc):
    g = _grid_function(config, _section(config, "generator"))
    cert_section = _section(config, "certificate")
    certificate = fit_tail_certificate(g, cert_section.get("d0", 0.0), cert_section.get("margin"))
    gabor = _section(config, "gabor")
    family = gabor_half_system(g, gabor.get("a", 1.0), gabor.get("b", 1.0),
                               gabor.get("M_max", 2), gabor.get("n_max", 1), certificate,
                               K=gabor.get("K"))
    operator = _section(config, "operator")
    orbit = build_function_orbit(family, operator.get("lambda"), operator.get("mu"),
                                 _eps(config), N=trunc)
    outcome = _function_outcome(orbit, jobs)
    outcome.summary.update({"certificate_C": _fmt(certificate.C),
                            "certificate_mu": _fmt(certificate.mu)})
    return outcome


def run_decomposition(config, jobs, trunc):
    section = _section(config, "decomposition")
    result = run_decomposition_pipeline(section.get("D", 20), section.get("epsilon", 0.5),
                                        section.get("p", 2.0), section.get("lambda", 4.0), jobs)
    run = result.run
    summary = {
        "lambda": _fmt(run.ops.lam),
        "norm_S": _fmt(run.ops.norm_S),
        "M": _fmt(run.eps.M),
        "epsilon": _fmt(result.epsilon),
        "closeness": str(result.closeness).lower(),
        "envelope_A": _fmt(result.envelope[0]),
        "envelope_B": _fmt(result.envelope[1]),
    }
    passed = run.report.passed and result.closeness
    if result.measured is not None:
        summary.update({"measured_A": _fmt(result.measured[0]),
                        "measured_B": _fmt(result.measured[1]),
                        "within_envelope": str(result.within_envelope).lower(),
                        "complete": str(result.complete).lower()})
        passed = passed and result.within_envelope and result.complete
    return Outcome(run.schedule, run.report, summary, passed)


RUNNERS = {
    "finite": run_finite,
    "localized": run_localized,
    "function": run_function,
    "gabor": run_gabor,
    "decomposition": run_decomposition,
}


# -- output ----------------------------------------------------------------------------

def write_outputs(outcome, out_dir):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    with (out_dir / "schedule.csv").open("w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["k", "alpha_k", "binding"])
        writer.writerows(outcome.schedule.rows())
    with (out_dir / "report.csv").open("w", newline="") as handle:
        outcome.report.to_csv(handle)
    lines = [f"{key} = {value}" for key, value in outcome.summary.items()]
    lines.append(f"all_checks_passed = {str(outcome.passed).lower()}")
    (out_dir / "summary.txt").write_text("\n".join(lines) + "\n")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="suborbit",
        description="Approximate a family by a suborbit of a weighted shift and certify it.")
    parser.add_argument("pipeline", choices=PIPELINES)
    parser.add_argument("--config", required=True, help="TOML run configuration")
    parser.add_argument("--out", default=".", help="directory for the CSV and summary files")
    parser.add_argument("--jobs", type=int, default=1, help="threads for per-k verification")
    parser.add_argument("--trunc", type=int, default=None,
                        help="number of family members summed into phi (default: all)")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        if args.jobs < 1:
            raise ConfigError(f"--jobs must be >= 1, got {args.jobs}")
        if args.trunc is not None and args.trunc < 0:
            raise ConfigError(f"--trunc must be >= 0, got {args.trunc}")
        config = load_config(args.config)
        declared = config.get("pipeline")
        if declared is not None and declared != args.pipeline:
            raise ConfigError(f"config declares pipeline {declared!r}, "
                              f"but {args.pipeline!r} was requested")
        log.info("running %s (seed from %s=%s)", args.pipeline, "SUBORBIT_SEED",
                 os.environ.get("SUBORBIT_SEED"))
        outcome = RUNNERS[args.pipeline](config, args.jobs, args.trunc)
    except (SuborbitError, ValueError, TypeError, KeyError) as exc:
        print(f"suborbit: error: {exc}", file=sys.stderr)
        return 2
    write_outputs(outcome, args.out)
    status = "passed" if outcome.passed else "FAILED"
    print(f"{args.pipeline}: {len(outcome.report)} rows, {status}; reports in {args.out}")
    return 0 if outcome.passed else 1


__all__ = ["PIPELINES", "build_parser", "load_config", "main", "write_outputs"]

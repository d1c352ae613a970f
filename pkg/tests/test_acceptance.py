"""Acceptance criteria, each at its stated tolerance.

Every test drives the same experiment runners the CLI uses and records one
PASS/FAIL line per criterion; the lines are printed at the end of the session.
"""
import time
import warnings
from pathlib import Path

import numpy as np
import pytest

from tlagauge.config import load_config
from tlagauge.experiments import run_experiment

CONFIGS = Path(__file__).resolve().parents[1] / "configs"
RESULTS: dict = {}


@pytest.fixture(scope="module", autouse=True)
def report(request):
    yield
    tr = request.config.pluginmanager.getplugin("terminalreporter")
    lines = [f"{'PASS' if ok else 'FAIL'} criterion {k}: {msg}"
             for k, (ok, msg) in sorted(RESULTS.items())]
    for line in lines:
        print(line)
        if tr is not None:
            tr.write_line(line)


def run(name, *overrides):
    t0 = time.perf_counter()
    res = run_experiment(load_config(CONFIGS / name, list(overrides)))
    return res, time.perf_counter() - t0


def judge(criterion, *results):
    checks = [c for r in results for c in r.checks if c.criterion == str(criterion)]
    assert checks, f"no checks recorded for criterion {criterion}"
    ok = all(c.passed for c in checks)
    msg = "; ".join(f"{c.name} {c.measured:.4g} (thr {c.threshold:.3g})" for c in checks)
    RESULTS[criterion] = (ok, msg)
    failed = [c.name for c in checks if not c.passed]
    assert ok, f"criterion {criterion} failed: {failed}"


@pytest.fixture(scope="module")
def dipole_run():
    return run("emission.yaml")


@pytest.fixture(scope="module")
def naive_run():
    return run("emission.yaml", "emission.gauge=naive-coulomb")


def test_criterion_1_analytic_ratio():
    res, _ = run("lineshape.yaml")
    judge(1, res)


def test_criterion_2_markov_normalization():
    res, _ = run("lineshape.yaml")
    judge(2, res)


def test_criterion_3_decay_oracle(dipole_run):
    res, wall = dipole_run
    judge(3, res)
    assert wall < 60


def test_criterion_4_dipole_lineshape(dipole_run):
    judge(4, dipole_run[0])


def test_criterion_5_naive_lineshape_and_ratio(naive_run):
    ratio, _ = run("gauge-compare.yaml")
    judge(5, naive_run[0], ratio)


@pytest.mark.slow
def test_criterion_6_corrected_coulomb_recovery():
    res, wall = run("gauge-compare-corrected.yaml")
    judge(6, res)
    assert wall < 600


def test_criterion_7_coupling_identity():
    res, wall = run("identity-check.yaml")
    assert res.metrics["n_models"] >= 100
    judge(7, res)
    assert wall < 60


def test_criterion_8_secular_gauge_invariance():
    res, wall = run("mastereq.yaml")
    judge(8, res)
    assert wall < 120


def test_criterion_9_nonsecular_gap_scaling():
    res, wall = run("gap-sweep.yaml")
    judge(9, res)
    assert wall < 120


def test_criterion_10_conservation_suite():
    """Re-runs the property-based conservation tests as one criterion."""
    import test_conservation as tc

    props = [getattr(tc, n) for n in dir(tc) if n.startswith("test_")]
    t0 = time.perf_counter()
    failures = []
    for prop in props:
        try:
            with warnings.catch_warnings():
                # truncated random oscillators leak on purpose here
                warnings.filterwarnings("ignore", "oscillator")
                prop()
        except Exception as exc:  # noqa: BLE001 - reported as a criterion failure
            failures.append(f"{prop.__name__}: {exc}")
    wall = time.perf_counter() - t0
    ok = not failures and wall < 300
    RESULTS[10] = (ok, f"{len(props)} properties, {len(failures)} failures, {wall:.1f}s")
    assert ok, failures

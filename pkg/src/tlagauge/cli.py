"""Command-line entry point: ``tlagauge run|validate|list-experiments``."""
from __future__ import annotations

import argparse
import logging
import os
import platform
import sys
import time
from pathlib import Path

EXIT_OK, EXIT_CHECK, EXIT_SCHEMA, EXIT_NUMERICAL = 0, 1, 2, 3

log = logging.getLogger("tlagauge")


def _set_threads(n: int | None):
    if n:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ[var] = str(n)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tlagauge",
                                description="Gauge-dependence experiments for a two-level atom.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the experiment described by a config file")
    run.add_argument("config")
    run.add_argument("--out", help="output directory (default: runs/<experiment>-seed<N>)")
    run.add_argument("--seed", type=int)
    run.add_argument("--threads", type=int, help="BLAS thread count")
    run.add_argument("--override", action="append", default=[], metavar="KEY=VALUE",
                     help="dotted config key, repeatable (e.g. emission.gauge=naive-coulomb)")

    val = sub.add_parser("validate", help="check a config without running it")
    val.add_argument("config")
    val.add_argument("--seed", type=int)
    val.add_argument("--override", action="append", default=[], metavar="KEY=VALUE")

    sub.add_parser("list-experiments", help="print the available experiment names")
    return p


def _load(args):
    from .config import load_config

    overrides = list(args.override)
    if getattr(args, "seed", None) is not None:
        overrides.append(f"seed={args.seed}")
    return load_config(args.config, overrides)


def derived_quantities(cfg) -> dict:
    from .emission import expected_dim
    from .emission.hamiltonian import derive_xi0
    from .experiments import system_from_config, tla_params

    params = tla_params(cfg)
    out = {"gamma0": params.gamma0, "d": params.d, "xi0": derive_xi0(params),
           "omega0": params.omega0}
    if cfg.experiment in ("emission", "gauge-compare"):
        out["hilbert_dim"] = expected_dim(cfg.bath.n_modes, cfg.emission.max_photons)
    if cfg.experiment == "mastereq":
        out["system_dim"] = system_from_config(cfg, params).dim
    return out


def _versions() -> dict:
    import numpy
    import scipy
    import yaml

    from . import __version__
    return {"tlagauge": __version__, "python": platform.python_version(),
            "numpy": numpy.__version__, "scipy": scipy.__version__, "pyyaml": yaml.__version__,
            "platform": platform.platform()}


def cmd_validate(args) -> int:
    from .config import SchemaError
    from .core import ConfigurationError, DomainError, ValidationError

    try:
        cfg = _load(args)
        derived = derived_quantities(cfg)
    except (SchemaError, ConfigurationError, ValidationError, DomainError) as exc:
        print(f"{args.config}: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    print(f"{args.config}: valid ({cfg.experiment})")
    for k, v in derived.items():
        print(f"  {k} = {v:.12g}" if isinstance(v, float) else f"  {k} = {v}")
    return EXIT_OK


def cmd_run(args) -> int:
    _set_threads(args.threads)
    from .config import SchemaError, config_to_dict
    from .core import ConfigurationError, DomainError, ValidationError
    from .emission import PropagationError
    from .io import write_csv, write_json
    from .mastereq import IntegrationError

    t0 = time.perf_counter()
    try:
        cfg = _load(args)
        derived = derived_quantities(cfg)
    except (SchemaError, ConfigurationError, ValidationError, DomainError) as exc:
        print(f"{args.config}: {exc}", file=sys.stderr)
        return EXIT_SCHEMA

    from .experiments import run_experiment

    out = Path(args.out or cfg.out or f"runs/{cfg.experiment}-seed{cfg.seed}")
    out.mkdir(parents=True, exist_ok=True)
    manifest = {"config": config_to_dict(cfg), "config_path": str(args.config),
                "overrides": list(args.override), "derived": derived, "versions": _versions()}
    try:
        res = run_experiment(cfg)
    except (PropagationError, IntegrationError) as exc:
        manifest["error"] = {"type": type(exc).__name__, "message": str(exc),
                             "diagnostics": getattr(exc, "diagnostics", {})}
        write_json(out / "manifest.json", manifest)
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ConfigurationError, ValidationError, DomainError) as exc:
        print(f"{args.config}: {exc}", file=sys.stderr)
        return EXIT_SCHEMA

    files = []
    for name, (header, cols) in res.tables.items():
        write_csv(out / name, header, cols)
        files.append(name)
    res.timings["wall"] = time.perf_counter() - t0
    manifest.update(timings=res.timings, outputs=sorted(files), warnings=res.warnings)
    write_json(out / "manifest.json", manifest)
    report = {
        "experiment": res.experiment,
        "seed": cfg.seed,
        "status": "PASS" if res.passed else "FAIL",
        "checks": [{"name": c.name, "criterion": c.criterion, "measured": c.measured,
                    "threshold": c.threshold, "result": "PASS" if c.passed else "FAIL",
                    "detail": c.detail} for c in res.checks],
        "metrics": res.metrics,
    }
    write_json(out / "report.json", report)
    for c in res.checks:
        tag = f"[{c.criterion}] " if c.criterion else ""
        print(f"{'PASS' if c.passed else 'FAIL'} {tag}{c.name}: measured {c.measured:.6g}, "
              f"threshold {c.threshold:.3g}")
    print(f"outputs in {out}")
    return EXIT_OK if res.passed else EXIT_CHECK


def cmd_list(_args) -> int:
    from .experiments import DESCRIPTIONS

    for name, desc in DESCRIPTIONS.items():
        print(f"{name:15s} {desc}")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handler = {"run": cmd_run, "validate": cmd_validate, "list-experiments": cmd_list}
    return handler[args.command](args)


if __name__ == "__main__":
    sys.exit(main())

"""Shared helpers for the study scripts."""
from pathlib import Path

from tlagauge.config import load_config
from tlagauge.experiments import run_experiment

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def run_config(name, overrides=()):
    return run_experiment(load_config(CONFIGS / name, list(overrides)))

"""Accelerated randomized coordinate descent for stochastic and online learning.

Thin Python layer over the C++ core. Datasets, losses, schedules and runs are
exposed directly; ``cli_main`` runs the command-line tool in-process.
"""

from ._arcd import *  # noqa: F401,F403
from ._arcd import __version__, cli_main, run, RunConfig, Algorithm

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]


def run_algorithm(data, algorithm="oarcd", horizon=1000, seed=1, **options):
    """Run one algorithm by name with keyword overrides of ``RunConfig`` fields."""
    config = RunConfig()
    config.algorithm = getattr(Algorithm, algorithm.upper())
    config.horizon = horizon
    config.seed = seed
    for key, value in options.items():
        if not hasattr(config, key):
            raise TypeError(f"unknown run option '{key}'")
        setattr(config, key, value)
    return run(config, data)

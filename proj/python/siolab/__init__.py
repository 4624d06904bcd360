"""Truncated and maximal singular integrals on discrete measures.

Thin re-export of the compiled module. Measures are built from graphs, the
Cantor construction or raw arrays; operators take a measure, a kernel and a
point:

    >>> import siolab
    >>> nu = siolab.cantor(3)
    >>> k = siolab.Kernel.riesz(2, 0)
    >>> siolab.maximal(nu, k, [0.5, 0.5]) >= 0
    True
"""

from ._core import *  # noqa: F401,F403
from ._core import ConfigError, __doc__ as _core_doc  # noqa: F401


def run_config_file(path, seed=None, threads=0, out_dir=""):
    """Runs the scenario described by the config file at `path`."""
    with open(path, encoding="utf-8") as fh:
        return run_scenario(fh.read(), seed=seed, threads=threads, out_dir=out_dir)  # noqa: F405

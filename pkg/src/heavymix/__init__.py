"""Numerical lab for convex-geometric membership oracles and mixture experiments.

Subpackages by capability:

- ``heavymix.lp``: dense bounded-variable simplex for equality-constrained LPs.
- ``heavymix.heavy_tail``: symmetrized-Pareto sources and empirical-mean
  concentration formulas.
- ``heavymix.centroid_body``: sampled centroid bodies (zonotopes), LP
  membership, Minkowski functionals and the weak membership oracle.
- ``heavymix.mixtures``: Gaussian-kernel interpolation and nearly
  indistinguishable Gaussian mixture pairs.
- ``heavymix.cumulants``: cumulant tensors, Khatri-Rao powers, Poisson
  reduction sampling and mixing-weight recovery.
- ``heavymix.smoothed``: smoothed-analysis experiments on the minimum singular
  value of multilinear Khatri-Rao squares.
- ``heavymix.experiments`` / ``heavymix.cli``: seeded experiment runner with
  CSV/JSON output.
"""

__version__ = "0.1.0"

from .rng import derive_rng, derive_seed

__all__ = ["__version__", "derive_rng", "derive_seed"]

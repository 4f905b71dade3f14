"""Exact-solution toolkit for spins coupled to a common noisy field.

Submodules:

* ``params`` - the shared physical parameter set.
* ``spinalg`` - spin-1/2 and spin-1 operator algebra.
* ``qme`` - master-equation construction, integration, correlators.
* ``trajectories`` - stochastic-unitary unraveling and Monte Carlo averaging.
* ``liouvillian`` - the collective spin-1 generator, spectra, sectors.
* ``combinatorics`` - Catalan/Riordan numbers and spin-1 multiplicities.
* ``bethe`` - root equations, Newton continuation, eigenvectors.
* ``asymptotics`` - infinite-ladder limit of the string decay rate.
* ``spectra`` - eigenvalue flows, spacing statistics, Weibull fits.
* ``figures``, ``io``, ``cli``, ``validate`` - reproduction pipelines,
  deterministic output, command line, acceptance harness.

Importing the package root stays light; pull in submodules explicitly.
"""

__version__ = "0.1.0"

__all__ = [
    "asymptotics", "bethe", "cli", "combinatorics", "errors", "figures",
    "io", "liouvillian", "params", "qme", "spectra", "spinalg",
    "trajectories", "validate",
]

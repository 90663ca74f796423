"""Exact cluster-algebra tools for geodesic functions on Riemann surfaces.

Modules: ``algebra`` (Laurent rational functions with half-integer exponents),
``quiver`` (mutation, seeds, Casimirs), ``poisson`` (log-canonical brackets),
``ribbon`` (ribbon graphs and holonomies), ``groupoid`` (unipotent matrices,
Pfaffians, rank conditions), ``reduction`` and ``suites`` (verification
pipelines) and ``cli``.
"""

__version__ = "0.1.0"

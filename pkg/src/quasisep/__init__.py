"""Quasiseparable two-dimensional magnetic Hamiltonians.

Modules: ``profiles`` (cubic-ODE profile families), ``classifier`` (which
separation case applies), ``fields`` (magnetic field, potential, gauges),
``operators`` (grid operators H and X, classical flow), ``harmonic``
(constant-field anisotropic oscillator), ``firstorder`` (systems with a
first-order integral), ``oracle`` (finite-difference eigensolver) and ``cli``.
"""

__version__ = "0.1.0"

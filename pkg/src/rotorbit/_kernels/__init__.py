"""Kernel backend selection.

The compiled extension (_kernels_c, Cython) and the pure numpy/python
fallback (_impl_py) implement the same four entry points with bit-identical
results: all transcendentals that could differ between vector and scalar
libraries are precomputed by the caller and passed in as arrays, and the
compiled code is built with FP contraction off. Set ROTORBIT_PURE=1 to force
the fallback.
"""

import os

if os.environ.get("ROTORBIT_PURE") == "1":
    from . import _impl_py as _impl

    BACKEND = "python"
else:
    try:
        from . import _kernels_c as _impl

        BACKEND = "c"
    except ImportError:
        from . import _impl_py as _impl

        BACKEND = "python"

ensemble_steps = _impl.ensemble_steps
backward_orbit_exact = _impl.backward_orbit_exact
backward_orbit_grid = _impl.backward_orbit_grid
greedy_separated = _impl.greedy_separated

__all__ = [
    "BACKEND",
    "ensemble_steps",
    "backward_orbit_exact",
    "backward_orbit_grid",
    "greedy_separated",
]

"""Build script: compiles the optional Cython kernel extension.

The package works without the extension (pure numpy/python fallback in
rotorbit._kernels._impl_py); building it just makes orbit iteration and
greedy separation counts faster. -ffp-contract=off keeps the compiled
arithmetic bit-identical to the fallback (no FMA re-rounding).
"""

import numpy
from setuptools import setup
from Cython.Build import cythonize

extensions = cythonize(
    "src/rotorbit/_kernels/_kernels_c.pyx",
    compiler_directives={
        "language_level": "3",
        "boundscheck": False,
        "wraparound": False,
        "cdivision": True,
    },
)
for ext in extensions:
    ext.include_dirs = [numpy.get_include()]
    ext.extra_compile_args = ["-O3", "-ffp-contract=off"]
    ext.define_macros = [("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")]

setup(ext_modules=extensions)

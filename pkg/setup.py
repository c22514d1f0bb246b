"""Builds the optional compiled split-scan kernel.

The package is fully functional without the extension (a numpy fallback is
selected at import); the build is skipped rather than failed when Cython is
unavailable.
"""

import os

from setuptools import Extension, setup

_PYX = os.path.join("src", "benfraud", "kernels", "_scan.pyx")

try:
    import numpy
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = [] if not os.path.exists(_PYX) else cythonize(
        [
            Extension(
                "benfraud.kernels._scan",
                [_PYX],
                include_dirs=[numpy.get_include()],
                # -ffp-contract=off keeps the compiled scan bit-identical to
                # the numpy fallback (no FMA fusion).
                extra_compile_args=["-O2", "-ffp-contract=off"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)

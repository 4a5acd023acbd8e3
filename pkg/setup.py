"""Build script: compiles the Cython sweep kernel when a toolchain is available.

The package works without the extension (a pure-Python kernel is selected at
import time), so failures here degrade performance, not correctness.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("AUTOMRF_NO_EXT", "") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools.extension import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "automrf._kernels._gibbs",
                    ["src/automrf/_kernels/_gibbs.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        import warnings

        warnings.warn(
            "Cython/numpy unavailable at build time; installing automrf "
            "with the pure-Python kernel only."
        )

setup(ext_modules=ext_modules)

"""Build the optional compiled statevector kernels.

If Cython or a C compiler is unavailable the package still installs and
falls back to the numpy implementation in ``schrobs.simulator._kernels_py``.
"""
import os

import numpy as np
from setuptools import Extension, setup

ext_modules = []
if os.environ.get("SCHROBS_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [
                Extension(
                    "schrobs.simulator._kernels",
                    ["src/schrobs/simulator/_kernels.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)

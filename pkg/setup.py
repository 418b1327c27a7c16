"""Build script for the optional compiled stepping kernel.

The package is fully functional without the extension (a numpy fallback is
selected at import time); building it speeds up master-equation propagation
by roughly an order of magnitude.  Build in place with

    python setup.py build_ext --inplace
"""
import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

extensions = []
if cythonize is not None:
    extensions = cythonize(
        [
            Extension(
                "heraldsim._core.kernel",
                ["src/heraldsim/_core/kernel.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3", "-fcx-limited-range", "-march=native"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=extensions)

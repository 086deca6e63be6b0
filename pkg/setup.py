"""Build the optional Cython kernel; the package falls back to numpy without it."""
import os

import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None and not os.environ.get("BELLSCOPE_NO_EXT"):
    ext_modules = cythonize(
        [Extension(
            "bellscope._kernels",
            ["src/bellscope/_kernels.pyx"],
            include_dirs=[numpy.get_include()],
            define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            extra_compile_args=["-O3", "-ffast-math"],
        )],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)

"""Build script for the optional compiled kernel.

The package works without the extension (a NumPy fallback is selected at
import time); building it just makes the Monte Carlo loop faster.
"""

import os

from setuptools import Extension, setup

try:
    import numpy as np
    from Cython.Build import cythonize
except ImportError:
    np = None
    cythonize = None


def extensions():
    if cythonize is None or np is None:
        return []
    rand_lib = os.path.join(os.path.dirname(np.random.__file__), "lib")
    ext = Extension(
        "angsep._speedups",
        ["src/angsep/_speedups.pyx"],
        include_dirs=[np.get_include()],
        library_dirs=[rand_lib],
        libraries=["npyrandom"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3"],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


setup(ext_modules=extensions())

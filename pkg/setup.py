"""Build script: compiles the optional Cython kernel extension.

The package is pure Python plus one optional extension module
(``kdvsato._kernels``) holding the two O(M^2) hot loops.  When Cython or a
C compiler is unavailable the build silently proceeds without the extension
and the numpy fallback in ``kdvsato._kernels_py`` is used at import time.
"""

import os

from setuptools import setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools import Extension

    extension = Extension(
        "kdvsato._kernels",
        sources=[os.path.join("src", "kdvsato", "_kernels.pyx")],
        include_dirs=[np.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3"],
    )
    ext_modules = cythonize([extension], language_level=3)
except ImportError:
    pass

setup(ext_modules=ext_modules)

"""Builds the compiled ranking kernel.

The package works without the extension (a pure-numpy fallback is selected
at import time); the Cython kernel only speeds up CMC/mAP evaluation on
large galleries.
"""

import numpy
from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "camstyle.evaluation._rank_cy",
        ["src/camstyle/evaluation/_rank_cy.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
]

setup(ext_modules=cythonize(extensions, language_level=3))

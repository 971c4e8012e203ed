"""Build hook for the optional compiled kernels.

The package is pure Python except for ``chrep._kernels._fast``, a Cython
translation of the row-reduction and modular matrix kernels.  The extension
is marked optional: if no compiler (or no Cython) is available the install
still succeeds and the package falls back to the reference implementation
at import time.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "chrep._kernels._fast",
                sources=["src/chrep/_kernels/_fast.pyx"],
                optional=True,
            )
        ],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)

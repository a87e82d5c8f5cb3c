"""Build script for the optional compiled kernel extension.

The package is pure Python plus one accelerator module (kaczmarz._core)
holding the two hot loops: the row-projection iteration and the one-sided
Jacobi sweeps.  If Cython or a C compiler is unavailable the build falls
back to the numpy implementations selected at import time; installation
never fails because of the extension.
"""

import os
import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Build the accelerator if possible, warn and continue otherwise."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing entirely
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        sys.stderr.write(
            "WARNING: building kaczmarz._core failed (%s); "
            "the pure-Python kernels will be used.\n" % (exc,)
        )


def _extensions():
    import numpy as np

    pyx = os.path.join("src", "kaczmarz", "_core.pyx")
    c = os.path.join("src", "kaczmarz", "_core.c")
    try:
        from Cython.Build import cythonize

        return cythonize(
            [
                Extension(
                    "kaczmarz._core",
                    [pyx],
                    include_dirs=[np.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        if os.path.exists(c):
            return [
                Extension(
                    "kaczmarz._core",
                    [c],
                    include_dirs=[np.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ]
        return []


setup(ext_modules=_extensions(), cmdclass={"build_ext": OptionalBuildExt})

"""Build script. The compiled kernel module is optional: if Cython or a C
compiler is unavailable the package installs anyway and falls back to the
pure numpy kernels at import time."""

import os
import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Let the extension build fail without failing the install."""

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
            "WARNING: compiled kernels not built (%s); "
            "hgresample will use the pure Python fallback\n" % (exc,)
        )


def extensions():
    if os.environ.get("HGRESAMPLE_NO_EXT") == "1":
        return []
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError:
        return []
    openmp = [] if os.environ.get("HGRESAMPLE_NO_OPENMP") == "1" else ["-fopenmp"]
    ext = Extension(
        "hgresample._kernels_cy",
        ["src/hgresample/_kernels_cy.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3"] + openmp,
        extra_link_args=list(openmp),
    )
    return cythonize(
        [ext],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "initializedcheck": False,
        },
    )


setup(ext_modules=extensions(), cmdclass={"build_ext": optional_build_ext})

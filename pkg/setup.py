"""Build script for the optional compiled kernel core.

The package is fully functional without the extension (a pure-Python
backend is selected at import time), so a failed compile downgrades to
a warning instead of aborting the install.
"""

import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:
            self._skip(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            self._skip(exc)

    @staticmethod
    def _skip(exc):
        sys.stderr.write(
            "WARNING: could not build the compiled kernel core (%s); "
            "mailcat will fall back to the pure-Python kernels.\n" % exc
        )


if cythonize is not None:
    # -ffp-contract=off keeps FMA contraction from changing rounding:
    # the compiled kernels must be bit-identical to the pure backend.
    compile_args = ["-O3", "-ffp-contract=off"] if sys.platform != "win32" else ["/O2"]
    extensions = cythonize(
        [
            Extension(
                "mailcat.kernels._core",
                sources=["src/mailcat/kernels/_core.pyx"],
                extra_compile_args=compile_args,
            )
        ],
        compiler_directives={"language_level": "3"},
    )
else:
    sys.stderr.write(
        "WARNING: Cython not available; skipping the compiled kernel core.\n"
    )
    extensions = []

setup(ext_modules=extensions, cmdclass={"build_ext": OptionalBuildExt})

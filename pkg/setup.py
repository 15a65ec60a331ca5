"""Build script for the optional compiled kernel extension.

The package works without the extension (a numpy fallback is selected at
import time), so a missing compiler or Cython only costs speed, never a
failed install.
"""

import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """build_ext that degrades to the pure-Python backend on failure."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # missing toolchain
            self._skip(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            self._skip(exc)

    @staticmethod
    def _skip(exc):
        warnings.warn(
            f"compiled kernels not built ({exc!r}); "
            "fixopt will use the pure-Python backend"
        )


extensions = [
    Extension(
        "fixopt._kernels",
        ["src/fixopt/_kernels.pyx"],
        extra_compile_args=["-O3"],
    )
]

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(extensions, compiler_directives={"language_level": "3"})
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules, cmdclass={"build_ext": optional_build_ext})

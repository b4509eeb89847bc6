"""Builds the optional compiled FFT kernel.

The package works without it (a vectorized numpy fallback is selected at
import time), so a failing C build only downgrades performance.
"""

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Skip the extension instead of failing the install when no compiler works."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # toolchain missing entirely
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        print(f"WARNING: compiled FFT kernel not built ({exc}); "
              "the pure-Python kernel will be used")


try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("btt_expm._fft_kernel", ["src/btt_expm/_fft_kernel.pyx"])],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules, cmdclass={"build_ext": optional_build_ext})

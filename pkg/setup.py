"""Build hook for the optional compiled kernel.

The package is pure Python plus one Cython extension holding the numeric
hot spots. The extension is a nice-to-have: if Cython or a C compiler is
missing, or the compile fails, installation proceeds and the package falls
back to the numpy implementation at import time.
"""

import warnings

from setuptools import setup
from setuptools.command.build_ext import build_ext


def _extensions():
    try:
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        warnings.warn("Cython not available, skipping compiled kernels")
        return []
    return cythonize(
        [Extension("cisim._kernels", ["src/cisim/_kernels.pyx"])],
        language_level=3,
    )


class optional_build_ext(build_ext):
    """Swallow compiler failures so the pure-Python install still lands."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing or broken toolchain
            warnings.warn(f"compiled kernels unavailable ({exc}), using numpy fallback")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn(f"failed to build {ext.name} ({exc}), using numpy fallback")


setup(ext_modules=_extensions(), cmdclass={"build_ext": optional_build_ext})

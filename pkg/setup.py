"""Build script for the optional compiled kernel extension.

The package is fully functional without the extension (a pure-Python
backend is selected at import time); building it just makes the raster
and search kernels fast on large grids.
"""

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Build the extension if possible, fall back to pure Python otherwise."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # no compiler, no Cython, etc.
            print(f"warning: compiled kernels skipped ({exc}); "
                  "pure-Python backend will be used")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: building {ext.name} failed ({exc}); "
                  "pure-Python backend will be used")


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "floodroute._kernels._core",
        ["src/floodroute/_kernels/_core.pyx"],
        # -ffp-contract=off keeps results bit-identical to the pure-Python
        # backend (no FMA contraction).
        extra_compile_args=["-O3", "-ffp-contract=off"],
    )
    return cythonize([ext], language_level=3)


setup(
    ext_modules=extensions(),
    cmdclass={"build_ext": OptionalBuildExt},
)

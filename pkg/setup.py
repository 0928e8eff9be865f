"""Build script: compiles the optional Cython speedups.

The package is fully functional without the extension (a NumPy fallback is
selected at import time), so a failing C build must not fail the install.
Set QIDINFER_REQUIRE_EXT=1 to turn a build failure into a hard error.
"""

import os

from setuptools import setup
from setuptools.command.build_ext import build_ext


def _extensions():
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        return []
    ext = Extension(
        "qidinfer._kernels._speedups",
        ["src/qidinfer/_kernels/_speedups.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3"],
    )
    return cythonize(
        [ext],
        compiler_directives={
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "language_level": 3,
        },
    )


class optional_build_ext(build_ext):
    """Skip the extension if the toolchain is missing or the build fails."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001 - any build failure is non-fatal
            if os.environ.get("QIDINFER_REQUIRE_EXT"):
                raise
            print(f"qidinfer: skipping compiled kernels ({exc!r}); "
                  "the NumPy fallback will be used")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            if os.environ.get("QIDINFER_REQUIRE_EXT"):
                raise
            print(f"qidinfer: failed to build {ext.name} ({exc!r}); "
                  "the NumPy fallback will be used")


setup(
    ext_modules=_extensions(),
    cmdclass={"build_ext": optional_build_ext},
)

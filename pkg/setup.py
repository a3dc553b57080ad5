"""Build script with an optional compiled kernel extension.

The hot numerical loops (ARMA innovation filtering and the conditional
residual recursion) live in ``horizonbench/_kernels/_native.pyx``.  If
Cython or a C compiler is missing the build silently falls back to the
pure-Python kernels; the package works either way.
"""

import sys

from setuptools import setup
from setuptools.command.build_ext import build_ext


def _native_extension():
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        return []
    ext = Extension(
        "horizonbench._kernels._native",
        ["src/horizonbench/_kernels/_native.pyx"],
        include_dirs=[numpy.get_include()],
        extra_compile_args=["-O3"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


class optional_build_ext(build_ext):
    """Never let a failed extension build break the install."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            print(f"warning: compiled kernels skipped ({exc}); "
                  "using pure-Python fallback", file=sys.stderr)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: building {ext.name} failed ({exc}); "
                  "using pure-Python fallback", file=sys.stderr)


setup(
    ext_modules=_native_extension(),
    cmdclass={"build_ext": optional_build_ext},
)

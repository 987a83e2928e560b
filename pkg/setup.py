"""Build the optional compiled integrator kernel.

The package is fully functional without the extension: hyprobin._kernels
falls back to the pure-Python integrator at import time. Compilation
failures are therefore downgraded to warnings instead of aborting the
install.
"""

import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext
from setuptools.errors import CCompilerError, ExecError, PlatformError

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

BUILD_ERRORS = (CCompilerError, ExecError, PlatformError, ValueError)


class OptionalBuildExt(build_ext):
    """build_ext that tolerates a missing or broken C toolchain."""

    def run(self):
        try:
            super().run()
        except PlatformError as exc:
            warnings.warn(f"skipping compiled kernel: {exc}")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except BUILD_ERRORS as exc:
            warnings.warn(f"skipping compiled kernel {ext.name}: {exc}")


if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "hyprobin._kernels._shoot_cy",
                ["src/hyprobin/_kernels/_shoot_cy.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
        compiler_directives={
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
else:
    warnings.warn("Cython not available, building without the compiled kernel")
    ext_modules = []

setup(ext_modules=ext_modules, cmdclass={"build_ext": OptionalBuildExt})

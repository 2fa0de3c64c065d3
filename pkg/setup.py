import warnings

import numpy as np
from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext

try:
    from Cython.Build import cythonize
except ImportError:
    warnings.warn("Cython not found; installing the pure-Python kernels only.")
    cythonize = None


class OptionalBuildExt(build_ext):
    """Let the install succeed without a compiler; kernels fall back to numpy."""

    def run(self):
        try:
            super().run()
        except Exception as exc:
            warnings.warn(f"compiled kernels not built: {exc}")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn(f"failed to build {ext.name}: {exc}")


ext_modules = []
if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "dirichlet_style._ckernels",
                ["src/dirichlet_style/_ckernels.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules, cmdclass={"build_ext": OptionalBuildExt})

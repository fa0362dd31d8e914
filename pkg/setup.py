"""Build script: compiles the accelerator extension when a toolchain is present.

The package is fully functional without the extension (a numpy fallback is
selected at import time), so any failure here is downgraded to a warning.
"""
import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # toolchain missing, etc.
            warnings.warn(f"building elasticbm._kernels._fast failed ({exc}); "
                          "falling back to the pure-numpy kernels")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn(f"building {ext.name} failed ({exc}); "
                          "falling back to the pure-numpy kernels")


def extensions():
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "elasticbm._kernels._fast",
        sources=["src/elasticbm/_kernels/_fast.pyx"],
        include_dirs=[np.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        # no -ffast-math: the fallback must stay bit-compatible
        extra_compile_args=["-O3"],
    )
    return cythonize([ext], language_level=3)


setup(cmdclass={"build_ext": OptionalBuildExt}, ext_modules=extensions())

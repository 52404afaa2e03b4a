import os

from setuptools import setup

ext_modules = []
if not os.environ.get("GRAPHCLUST_NO_EXT"):
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools.extension import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "graphclust._kernels._core",
                    ["src/graphclust/_kernels/_core.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            language_level=3,
        )
    except ImportError:
        # No Cython toolchain: install with the pure NumPy kernels only.
        ext_modules = []

setup(ext_modules=ext_modules)

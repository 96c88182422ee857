import os

import numpy as np
from setuptools import Extension, setup

# The compiled kernels are optional: the package falls back to the pure
# numpy implementations in primalign._kernels._numpy when the extension
# is unavailable.  Set PRIMALIGN_SKIP_NATIVE=1 to install without it.
ext_modules = []
if not os.environ.get("PRIMALIGN_SKIP_NATIVE"):
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "primalign._kernels._native",
                ["src/primalign/_kernels/_native.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )

setup(ext_modules=ext_modules)

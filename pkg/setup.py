import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "pvextremes._kernel_cy",
                ["src/pvextremes/_kernel_cy.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    # No Cython available: install the pure-numpy package; the kernel
    # selector falls back at import time.
    extensions = []

setup(ext_modules=extensions)

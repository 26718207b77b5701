import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "spraakprep._kernels",
                ["src/spraakprep/_kernels.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    # Without Cython the package installs anyway; the pure-Python kernel
    # backend is selected at import time.
    extensions = []

setup(ext_modules=extensions)

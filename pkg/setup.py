import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "ttplon._kernels",
        ["src/ttplon/_kernels.pyx"],
        include_dirs=[np.get_include()],
        # No -ffast-math / FMA contraction: fitness must match the Python evaluator bit for bit.
        extra_compile_args=["-O3", "-ffp-contract=off"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
]

setup(
    ext_modules=cythonize(extensions, compiler_directives={"language_level": "3"}),
)

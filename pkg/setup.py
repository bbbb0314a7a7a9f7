import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    # Pure-Python install: spconvex falls back to the _jacobi_py twin at import.
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "spconvex._jacobi",
                ["src/spconvex/_jacobi.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)

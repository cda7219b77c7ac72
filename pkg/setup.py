import os

import numpy as np
from setuptools import Extension, setup

# pure-Python installs skip the extension; densecoding.kernels falls back to NumPy
if os.environ.get("DENSECODING_PURE_PYTHON", "") not in ("", "0"):
    ext_modules = []
else:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension(
            "densecoding._kernels",
            ["src/densecoding/_kernels.pyx"],
            include_dirs=[np.get_include()],
            extra_compile_args=["-O3"],
        )],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)

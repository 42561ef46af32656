"""Build the optional compiled kernels.

The package works without them; ``sumprod.kernels`` falls back to the numpy
implementation when ``sumprod._ckernels`` cannot be imported.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("SUMPROD_NO_EXT") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "sumprod._ckernels",
                    ["src/sumprod/_ckernels.pyx"],
                    include_dirs=[np.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)

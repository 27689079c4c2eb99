"""Build script: compiles the optional Louvain kernel extension.

The package is fully functional without the extension (a pure-Python
fallback is selected at import time), so any build failure here is
downgraded to a warning instead of aborting the install.
"""

import warnings

from setuptools import setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "commaug.community._core",
                ["src/commaug/community/_core.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # pragma: no cover - depends on toolchain
    warnings.warn(f"skipping compiled kernels, using pure-Python fallback: {exc}")

setup(ext_modules=ext_modules)

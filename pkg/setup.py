"""Builds the optional compiled row-reduction kernel.

If Cython or a C compiler is unavailable the package installs without it and
``dgheart.linalg`` falls back to the numpy implementation.
"""

from setuptools import setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "dgheart._rref",
                ["src/dgheart/_rref.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # pragma: no cover - build environment dependent
    print(f"dgheart: building without compiled kernel ({exc})")

setup(ext_modules=ext_modules)

"""Build script: compiles the optional native kernel extension.

The package works without the extension (a numpy fallback is selected at
import time), so a failed compile only costs speed, not functionality.
"""

import sys

from setuptools import setup


def native_extensions():
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError as exc:
        print(f"pansharp: skipping native kernels ({exc})", file=sys.stderr)
        return []
    return cythonize(
        ["src/pansharp/_native.pyx"],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
        include_path=[numpy.get_include()],
    )


try:
    import numpy

    include_dirs = [numpy.get_include()]
except ImportError:
    include_dirs = []

setup(
    ext_modules=native_extensions(),
    include_dirs=include_dirs,
)

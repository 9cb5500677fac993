"""Build script; compiles the optional C kernel extension when Cython is present.

The package is fully functional without the extension (a pure-Python kernel
with identical behaviour is selected at import time), so any failure here
degrades to a pure-Python install instead of aborting.
"""

import sys

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        "src/warmflow/_kernel_c.pyx",
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "initializedcheck": False,
        },
    )
except Exception as exc:  # noqa: BLE001 - any build-env problem means "no extension"
    print(f"warmflow: building without compiled kernel ({exc})", file=sys.stderr)

setup(ext_modules=ext_modules)

"""Build script: compiles the jet-convolution kernel when a toolchain is available.

The package is fully functional without the extension (a numpy fallback is
selected at import time), so any build failure here downgrades to a pure
Python install instead of aborting.
"""

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "achvol._kernels",
                ["src/achvol/_kernels.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # no cython / no compiler: pure-python install
    print(f"achvol: building without compiled kernels ({exc})")

setup(ext_modules=ext_modules)

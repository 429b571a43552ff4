"""Build script: compiles the optional Cython accelerator.

The package works without it (a numpy fallback is selected at import),
so a failed extension build must not fail the install.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    accel = Extension(
        "cyclozeta._accel",
        sources=["src/cyclozeta/_accel.pyx"],
        extra_compile_args=["-O2"],
    )
    accel.optional = True
    ext_modules = cythonize([accel], language_level=3)
except ImportError:
    pass

setup(ext_modules=ext_modules)

import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "roundingrank._simplex",
                ["src/roundingrank/_simplex.pyx"],
                include_dirs=[numpy.get_include()],
                # keep arithmetic identical to the numpy fallback kernel
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
else:
    # no Cython available: install with the pure-Python simplex kernel only
    ext_modules = []

setup(ext_modules=ext_modules)

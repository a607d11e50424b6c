"""Build script for the optional compiled kernel extension.

The extension is a performance twin of fracnoether._kernels' numpy routines.
Compiled deliberately without -ffast-math or -march=native so the arithmetic
stays IEEE-conformant and bit-identical to the pure-numpy fallback; see
benchmarks/bench_kernels.py for the speed comparison.
"""

from setuptools import Extension, setup

try:
    import numpy
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "fracnoether._kernels_cy",
                ["src/fracnoether/_kernels_cy.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)

"""Build script for the optional compiled refinement kernel.

The package is pure Python apart from varroof.kernels._refine, a Cython
translation of the ensemble-isometry refinement loop.  When Cython or a C
compiler is unavailable the build proceeds without it and the package falls
back to the pure-Python kernel at import time.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "varroof.kernels._refine",
                ["src/varroof/kernels/_refine.pyx"],
                # FMA contraction would let the compiled kernel drift from the
                # pure-Python one; keep both on plain IEEE double ops.
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)

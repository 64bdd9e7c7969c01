import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    # The package still works without the compiled core: a numpy fallback
    # is selected at import time.
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "swldpc._kernels._core",
                ["src/swldpc/_kernels/_core.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3", "-funroll-loops"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)

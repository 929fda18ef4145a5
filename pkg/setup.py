import os

from setuptools import Extension, setup

# The compiled kernels are an optional speedup: the package selects a pure-Python
# fallback at import time when the extension is absent.  NULLHELIX_NO_EXT=1 skips
# the build entirely (useful on hosts without a C toolchain).
ext_modules = []
if not os.environ.get("NULLHELIX_NO_EXT"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "nullhelix._jetcore",
                    ["src/nullhelix/_jetcore.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)

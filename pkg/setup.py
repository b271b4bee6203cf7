# Builds the optional compiled enumerator kernel. The package works without
# it (pure-Python fallback selected at import), so any build failure here is
# non-fatal: install with KINDMC_NO_EXT=1 to skip the extension entirely.
import os

from setuptools import setup

ext_modules = []
if not os.environ.get("KINDMC_NO_EXT"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            ["src/kindmc/_evalcore.pyx"],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        pass

setup(ext_modules=ext_modules)

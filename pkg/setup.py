"""Build shim: compiles the Cython kernel extension unless SECPHY_NO_EXT is set.

Everything declarative lives in pyproject.toml; this file only exists because
ext_modules cannot be expressed there.
"""
import os

from setuptools import setup

if os.environ.get("SECPHY_NO_EXT"):
    ext_modules = []
else:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/secphy/_kernels/_speedups.pyx"],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)

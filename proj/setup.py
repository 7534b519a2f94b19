"""Build script for the fisherclt Python extension.

Compiles the C++ core together with the pybind11 bindings into
``fisherclt._core``.  Metadata lives in pyproject.toml; this file only
describes the native extension.
"""

from glob import glob

from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup

ext = Pybind11Extension(
    "fisherclt._core",
    sorted(glob("src/*.cpp")) + ["bindings/py_module.cpp"],
    include_dirs=["include", "vendor"],
    libraries=["fftw3", "lapacke", "lapack", "blas"],
    cxx_std=20,
    extra_compile_args=["-O3", "-fopenmp"],
    extra_link_args=["-fopenmp"],
)

setup(ext_modules=[ext], cmdclass={"build_ext": build_ext})

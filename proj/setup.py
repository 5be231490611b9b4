import os

from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup


def eigen_include():
    for cand in ("/usr/include/eigen3", "/usr/local/include/eigen3"):
        if os.path.isdir(cand):
            return cand
    raise RuntimeError("Eigen3 headers not found")


core_sources = [
    "src/euclidean.cpp",
    "src/levels.cpp",
    "src/quadrature.cpp",
    "src/grid.cpp",
    "src/ultrafunction.cpp",
    "src/derivative.cpp",
    "src/observable.cpp",
    "src/evolution.cpp",
    "src/io.cpp",
]

ext = Pybind11Extension(
    "ultralab._core",
    sources=["bindings/module.cpp"] + core_sources,
    include_dirs=["include", "vendor", eigen_include()],
    libraries=["lapacke", "openblas"],
    define_macros=[("LAPACK_COMPLEX_CPP", None)],
    cxx_std=20,
)

setup(ext_modules=[ext], cmdclass={"build_ext": build_ext})

import glob

from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup

sources = ["python/bindings.cpp"] + sorted(
    path for path in glob.glob("src/*.cpp") if not path.endswith("cli.cpp")
)

ext_modules = [
    Pybind11Extension(
        "sigver._sigver",
        sources,
        include_dirs=["include", "/usr/include/eigen3"],
        cxx_std=20,
    )
]

setup(
    name="sigver",
    version="0.1.0",
    description="writer-dependent online signature verification toolkit",
    packages=["sigver"],
    package_dir={"": "python"},
    ext_modules=ext_modules,
    cmdclass={"build_ext": build_ext},
    zip_safe=False,
)

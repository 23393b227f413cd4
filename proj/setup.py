"""CMake-driven build of the amtl._core extension.

The C++ core, the extension module, and the test suites all live in one CMake
tree; this shim configures that tree with only the python pieces enabled and
drops the built module into the wheel layout.
"""

import os
import subprocess
import sys
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name: str):
        super().__init__(name, sources=[])


class CMakeBuild(build_ext):
    def build_extension(self, ext: CMakeExtension) -> None:
        source_dir = Path(__file__).resolve().parent
        build_dir = Path(self.build_temp) / "cmake"
        build_dir.mkdir(parents=True, exist_ok=True)

        out_dir = Path(self.get_ext_fullpath(ext.name)).resolve().parent
        out_dir.mkdir(parents=True, exist_ok=True)

        configure = [
            "cmake",
            "-S", str(source_dir),
            "-B", str(build_dir),
            f"-DCMAKE_BUILD_TYPE={os.environ.get('AMTL_BUILD_TYPE', 'Release')}",
            f"-DPython3_EXECUTABLE={sys.executable}",
            "-DAMTL_BUILD_PYTHON=ON",
            "-DAMTL_BUILD_TESTS=OFF",
            "-DAMTL_BUILD_CLI=OFF",
        ]
        subprocess.run(configure, check=True)
        subprocess.run(
            ["cmake", "--build", str(build_dir), "--target", "amtl_python",
             f"-j{os.cpu_count() or 2}"],
            check=True,
        )

        staged = build_dir / "python" / "amtl"
        for module in staged.glob("_core*"):
            self.copy_file(str(module), str(out_dir / module.name))


setup(
    packages=["amtl"],
    package_dir={"": "python"},
    ext_modules=[CMakeExtension("amtl._core")],
    cmdclass={"build_ext": CMakeBuild},
    zip_safe=False,
)

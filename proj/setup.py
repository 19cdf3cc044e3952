import os
import subprocess
import sys
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name):
        super().__init__(name, sources=[])


class CMakeBuild(build_ext):
    def build_extension(self, ext):
        extdir = Path(self.get_ext_fullpath(ext.name)).resolve().parent
        source = Path(__file__).resolve().parent
        build_temp = Path(self.build_temp) / "cmake"
        build_temp.mkdir(parents=True, exist_ok=True)
        cfg = [
            "cmake",
            str(source),
            f"-DCMAKE_LIBRARY_OUTPUT_DIRECTORY={extdir}",
            "-DCMAKE_BUILD_TYPE=Release",
            f"-DPython3_EXECUTABLE={sys.executable}",
        ]
        subprocess.run(cfg, cwd=build_temp, check=True)
        jobs = str(os.cpu_count() or 2)
        subprocess.run(
            ["cmake", "--build", ".", "--target", "_coxcount", "-j", jobs],
            cwd=build_temp,
            check=True,
        )


setup(
    packages=["coxcount"],
    package_dir={"coxcount": "python/coxcount"},
    ext_modules=[CMakeExtension("coxcount._coxcount")],
    cmdclass={"build_ext": CMakeBuild},
)

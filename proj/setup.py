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
        source_dir = Path(__file__).resolve().parent
        build_dir = Path(self.build_temp).resolve() / "cmake"
        build_dir.mkdir(parents=True, exist_ok=True)
        # the extension lands next to the pure package, wherever setuptools
        # wants it (site-packages staging or in-tree for editable installs)
        prefix = Path(self.get_ext_fullpath(ext.name)).resolve().parent.parent
        subprocess.run(
            [
                "cmake",
                str(source_dir),
                "-DPLAPWAVE_WHEEL_BUILD=ON",
                f"-DPython3_EXECUTABLE={sys.executable}",
                f"-DPython_EXECUTABLE={sys.executable}",
                "-DCMAKE_BUILD_TYPE=Release",
            ],
            cwd=build_dir,
            check=True,
        )
        subprocess.run(
            ["cmake", "--build", ".", "--target", "_core", "--parallel"],
            cwd=build_dir,
            check=True,
        )
        subprocess.run(
            ["cmake", "--install", ".", "--prefix", str(prefix)], cwd=build_dir, check=True
        )


setup(
    ext_modules=[CMakeExtension("plapwave._core")],
    cmdclass={"build_ext": CMakeBuild},
)

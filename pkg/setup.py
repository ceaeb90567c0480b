import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("CCWB_NO_EXT"):
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("ccwb._vmcore", ["src/ccwb/_vmcore.pyx"], language="c++")],
        language_level=3,
    )

setup(ext_modules=ext_modules)

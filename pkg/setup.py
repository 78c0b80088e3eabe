import os

from setuptools import Extension, setup


def extensions():
    if os.environ.get("RELUCHECK_PURE") == "1":
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension("relucheck._rowops", ["src/relucheck/_rowops.pyx"])
    return cythonize(
        [ext],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
        },
    )


setup(ext_modules=extensions())

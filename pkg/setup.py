from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("inscap._native", ["src/inscap/_native.pyx"])],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except ImportError:
    # Source distribution without Cython: fall back to the pure-Python kernels.
    ext_modules = []

setup(ext_modules=ext_modules)

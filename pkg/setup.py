from setuptools import Extension, setup

# The compiled kernels are optional: geoask.geometry falls back to the
# pure-Python implementations when the extension is unavailable.
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("geoask._geokernels", ["src/geoask/_geokernels.pyx"])],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)

from setuptools import setup, Extension

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("uwbsim._core", ["src/uwbsim/_core.pyx"])],
        language_level=3,
    )
except ImportError:
    # No Cython available: install without the compiled kernels, the
    # pure-Python fallback in uwbsim._core_py is selected at import.
    ext_modules = []

setup(ext_modules=ext_modules)

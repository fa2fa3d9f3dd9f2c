"""Build hook for the optional compiled deposition kernel.

The package is pure Python plus one optional Cython extension
(``heraldlab._deposit``).  The extension is marked ``optional`` so the
package installs and works (via the numpy fallback in
``heraldlab._deposit_py``) even when no C compiler is available.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "heraldlab._deposit",
                ["src/heraldlab/_deposit.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        language_level="3",
    )
except ImportError:
    # No Cython at build time: install as pure Python.
    pass

setup(ext_modules=ext_modules)

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("GEQN_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        import numpy as np
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [Extension("geqn._ckernels", ["src/geqn/_ckernels.pyx"], include_dirs=[np.get_include()])],
            language_level=3,
        )
    except ImportError:
        # no Cython/numpy at build time: the pure Python kernels are used
        ext_modules = []

setup(ext_modules=ext_modules)

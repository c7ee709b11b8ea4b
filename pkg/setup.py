"""Build the optional compiled integrator core.

The package works without the extension (a pure-Python kernel is selected
at import time), so a failed cythonization or compile is downgraded to a
warning instead of aborting the install.
"""

import warnings

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        "src/mems_lab/_core.pyx",
        language_level=3,
        compiler_directives={
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
    for ext in ext_modules:
        # -ffp-contract=off keeps the compiled kernel bit-compatible with the
        # pure-Python fallback (no fused multiply-add contraction).
        ext.extra_compile_args = ["-O3", "-ffp-contract=off"]
except Exception as exc:  # pragma: no cover - build environment dependent
    warnings.warn(f"Cython core not built ({exc}); pure-Python kernels will be used")

setup(ext_modules=ext_modules)

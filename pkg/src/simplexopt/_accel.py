"""Selects the compiled step kernels when available.

``SIMPLEXOPT_PURE_PYTHON=1`` in the environment forces the numpy fallback
(useful for debugging and for benchmarking the two side by side).
"""

import os

if os.environ.get("SIMPLEXOPT_PURE_PYTHON") == "1":
    from . import _kernels_py as kernels
else:
    try:
        from . import _kernels as kernels  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as kernels

USING_COMPILED = bool(getattr(kernels, "COMPILED", False))

step_stats = kernels.step_stats
cs_linear_apply = kernels.cs_linear_apply
cs_exp_apply = kernels.cs_exp_apply
egd_apply = kernels.egd_apply
project_simplex = kernels.project_simplex

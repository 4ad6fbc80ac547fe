"""Hot-loop kernels with import-time backend selection.

The compiled Cython sweep is preferred when it built successfully; otherwise
(or when QFAIR_PURE_PYTHON=1 is set) the numpy fallback is used. Both expose
the same `grover_sweep` contract and agree to floating-point roundoff.
"""

from __future__ import annotations

import os

from ._grover_py import grover_sweep as grover_sweep_py

if os.environ.get("QFAIR_PURE_PYTHON") == "1":
    grover_sweep = grover_sweep_py
    BACKEND = "python"
else:
    try:
        from ._grover_cy import grover_sweep as grover_sweep_cy

        grover_sweep = grover_sweep_cy
        BACKEND = "cython"
    except ImportError:
        grover_sweep = grover_sweep_py
        BACKEND = "python"

__all__ = ["BACKEND", "grover_sweep", "grover_sweep_py"]

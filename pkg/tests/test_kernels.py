"""Backend selection and compiled-vs-fallback agreement for the sweep kernel."""

from __future__ import annotations

import os
import subprocess
import sys

import numpy as np
import pytest

from qfair import _kernels
from qfair._kernels import _grover_py

from .conftest import random_state

try:
    from qfair._kernels import _grover_cy
except ImportError:
    _grover_cy = None


def random_case(rng, n):
    dim = 2**n
    psi = random_state(dim, rng).amplitudes
    marked = (rng.random(dim) < 0.5).astype(np.uint8)
    if marked.sum() in (0, dim):
        marked[0] ^= 1
    return psi, marked


def test_backend_is_declared():
    assert _kernels.BACKEND in ("cython", "python")
    assert callable(_kernels.grover_sweep)


def test_python_fallback_always_available():
    assert _kernels.grover_sweep_py is _grover_py.grover_sweep


@pytest.mark.skipif(_grover_cy is None, reason="compiled kernel not built")
def test_compiled_matches_fallback(rng):
    for n in (2, 5, 9, 12):
        psi, marked = random_case(rng, n)
        for iterations in (0, 1, 3, 10):
            a = _grover_cy.grover_sweep(psi, marked, psi, iterations)
            b = _grover_py.grover_sweep(psi, marked, psi, iterations)
            assert np.max(np.abs(a - b)) < 1e-12


def test_sweep_preserves_norm(rng):
    psi, marked = random_case(rng, 8)
    out = _kernels.grover_sweep(psi, marked, psi, 25)
    assert abs(np.linalg.norm(out) - 1.0) < 1e-10


def test_sweep_does_not_mutate_input(rng):
    psi, marked = random_case(rng, 4)
    before = psi.copy()
    _kernels.grover_sweep(psi, marked, psi, 5)
    assert np.array_equal(psi, before)


def test_zero_iterations_is_identity(rng):
    psi, marked = random_case(rng, 6)
    out = _kernels.grover_sweep(psi, marked, psi, 0)
    assert np.array_equal(out, psi)


def test_env_var_forces_python_backend():
    env = dict(os.environ, QFAIR_PURE_PYTHON="1")
    code = "from qfair._kernels import BACKEND; print(BACKEND)"
    result = subprocess.run(
        [sys.executable, "-c", code], capture_output=True, text=True, env=env, check=True
    )
    assert result.stdout.strip() == "python"

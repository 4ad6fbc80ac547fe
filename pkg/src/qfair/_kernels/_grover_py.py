"""Pure-numpy amplitude-amplification sweep (fallback for the compiled kernel)."""

from __future__ import annotations

import numpy as np


def grover_sweep(
    amplitudes: np.ndarray, marked: np.ndarray, axis: np.ndarray, iterations: int
) -> np.ndarray:
    """Apply the two-reflection iteration `iterations` times without
    materialising the operator.

    Each iteration flips the sign of every unmarked amplitude, then reflects
    about the fixed axis state: phi <- 2 <axis|phi> axis - phi.
    """
    phi = np.array(amplitudes, dtype=np.complex128)
    axis = np.asarray(axis, dtype=np.complex128)
    sign = np.where(np.asarray(marked, dtype=bool), 1.0, -1.0)
    for _ in range(int(iterations)):
        phi *= sign
        phi = 2.0 * np.vdot(axis, phi) * axis - phi
    return phi

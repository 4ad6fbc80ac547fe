"""Distance measures between states: Hamming, trace distance, fidelity and
its angle, and quantum relative entropy (base-2 logarithms)."""

from __future__ import annotations

import enum
import math
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, ValidationError
from .linalg import TOL_STRUCT, DensityMatrix, hermitian_fn

# Eigenvalues below this are treated as exact zeros when deciding support
# containment for the relative entropy.
KERNEL_TOL = 1e-12


class MetricChoice(enum.Enum):
    """Selectable state-distance measure for fairness checks and the CLI."""

    TRACE = "trace"
    FIDELITY_ANGLE = "fidelity_angle"
    RELATIVE_ENTROPY = "relative_entropy"

    @classmethod
    def from_cli_name(cls, name: str) -> "MetricChoice":
        try:
            return cls(name.replace("-", "_"))
        except ValueError:
            raise ValidationError(f"unknown metric {name!r}") from None


def hamming(a: str | Sequence[int], b: str | Sequence[int]) -> int:
    """Number of positions at which two equal-length bit strings differ."""
    bits_a = [int(x) for x in a]
    bits_b = [int(x) for x in b]
    if len(bits_a) != len(bits_b):
        raise ValidationError(f"bit strings differ in length: {len(bits_a)} vs {len(bits_b)}")
    if any(x not in (0, 1) for x in bits_a + bits_b):
        raise ValidationError("bit strings must contain only 0/1")
    return sum(x != y for x, y in zip(bits_a, bits_b))


def _check_dims(rho: DensityMatrix, sigma: DensityMatrix):
    if rho.dim != sigma.dim:
        raise DimensionMismatch(f"state dims differ: {rho.dim} != {sigma.dim}")


def trace_distance(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Half the trace norm of rho - sigma; in [0, 1]."""
    _check_dims(rho, sigma)
    eigenvalues = np.linalg.eigvalsh(rho.matrix - sigma.matrix)
    return float(0.5 * np.sum(np.abs(eigenvalues)))


def fidelity(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """tr sqrt(sqrt(rho) sigma sqrt(rho)), clamped into [0, 1] against roundoff."""
    _check_dims(rho, sigma)
    sqrt_rho = hermitian_fn(rho, np.sqrt, clamp=True).matrix
    inner = sqrt_rho @ sigma.matrix @ sqrt_rho
    eigenvalues = np.linalg.eigvalsh((inner + inner.conj().T) / 2)
    # sqrt amplifies eigensolver noise (sqrt(1e-16) per spurious mode), so
    # rank-deficiency noise is zeroed before the square root.
    floor = max(1e-14, rho.dim * 5e-16)
    eigenvalues = np.where(eigenvalues < floor, 0.0, eigenvalues)
    value = float(np.sum(np.sqrt(eigenvalues)))
    return min(max(value, 0.0), 1.0)


def fidelity_angle(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """arccos of the fidelity; a metric with values in [0, pi/2]."""
    return float(np.arccos(fidelity(rho, sigma)))


def relative_entropy(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """tr(rho log2 rho) - tr(rho log2 sigma); +inf when supp(rho) ⊄ supp(sigma)."""
    _check_dims(rho, sigma)
    p, _ = np.linalg.eigh(rho.matrix)
    q, v = np.linalg.eigh(sigma.matrix)
    p = np.maximum(p, 0.0)

    # Probability mass rho places on each eigenvector of sigma.
    weights = np.real(np.einsum("ij,jk,ki->i", v.conj().T, rho.matrix, v))
    kernel = q < KERNEL_TOL
    if float(np.sum(weights[kernel])) > KERNEL_TOL:
        return math.inf

    entropy_term = float(np.sum(p[p > KERNEL_TOL] * np.log2(p[p > KERNEL_TOL])))
    cross_term = float(np.sum(weights[~kernel] * np.log2(q[~kernel])))
    return entropy_term - cross_term


def state_distance(rho: DensityMatrix, sigma: DensityMatrix, metric: MetricChoice) -> float:
    """Dispatch to the chosen measure."""
    if metric is MetricChoice.TRACE:
        return trace_distance(rho, sigma)
    if metric is MetricChoice.FIDELITY_ANGLE:
        return fidelity_angle(rho, sigma)
    if metric is MetricChoice.RELATIVE_ENTROPY:
        return relative_entropy(rho, sigma)
    raise ValidationError(f"unsupported metric {metric!r}")

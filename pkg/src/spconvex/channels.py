"""Unital trace-preserving completely positive maps.

Only the two channel classes the monotonicity statements need are
constructed here: pinching conditional expectations (spectral projections
of a fixed self-adjoint matrix) and random mixtures of unitaries.  Both
are automatically unital and trace-preserving.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT, Tolerances
from .errors import DimensionError
from .matcore import as_selfadjoint, as_square, eigh, matrix_function


@dataclass(frozen=True)
class QuantumChannel:
    """Kraus representation X -> sum_i K_i X K_i*.

    ``weights`` is set for unitary mixtures (K_i = sqrt(a_i) U_i) and used
    by validation to recover the unitaries.
    """

    kraus: tuple
    weights: tuple | None = None
    kind: str = "custom"

    @property
    def dim(self) -> int:
        return self.kraus[0].shape[0]


@dataclass(frozen=True)
class ChannelValidation:
    trace_residual: float
    unital_residual: float
    unitarity_residual: float
    weight_residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return (
            max(self.trace_residual, self.unital_residual, self.unitarity_residual) <= self.tolerance
        )


def apply_channel(channel: QuantumChannel, X, adjoint: bool = False) -> np.ndarray:
    """Forward sum K_i X K_i*, or the Hilbert-Schmidt adjoint sum K_i* X K_i."""
    Xm = as_square(X)
    if Xm.shape[0] != channel.dim:
        raise DimensionError(
            f"channel dimension {channel.dim} does not match operand {Xm.shape}"
        )
    out = np.zeros_like(Xm)
    for K in channel.kraus:
        if adjoint:
            out += K.conj().T @ Xm @ K
        else:
            out += K @ Xm @ K.conj().T
    return out


def pinching_of(B, tol: Tolerances = DEFAULT) -> QuantumChannel:
    """Conditional expectation onto the algebra generated by self-adjoint B.

    Kraus operators are B's spectral projections; the channel fixes B,
    is idempotent, commutes its output with B, preserves traces and is a
    Schatten-norm contraction.
    """
    dec = eigh(as_selfadjoint(B, tol.selfadjoint_rtol), tol=tol)
    return QuantumChannel(kraus=tuple(dec.projections), weights=None, kind="pinching")


def random_unitary(n: int, rng: np.random.Generator, tol: Tolerances = DEFAULT) -> np.ndarray:
    """exp(iH) for a random self-adjoint H with entries ~ N(0,1)/sqrt(n)."""
    G = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    H = (G + G.conj().T) / (2.0 * np.sqrt(n))
    return matrix_function(lambda x: np.exp(1j * x), H, tol)


def unitary_mixture(n: int, m: int, seed: int, tol: Tolerances = DEFAULT) -> QuantumChannel:
    """Random mixture of m unitaries with weights bounded away from zero.

    Deterministic in ``seed``: same seed, bitwise-identical Kraus list.
    """
    if n < 1 or m < 1:
        raise ValueError("unitary_mixture requires n >= 1 and m >= 1")
    rng = np.random.default_rng(seed)
    weights = rng.uniform(0.1, 1.0, size=m)
    weights = weights / weights.sum()
    kraus = tuple(np.sqrt(w) * random_unitary(n, rng, tol) for w in weights)
    return QuantumChannel(kraus=kraus, weights=tuple(float(w) for w in weights), kind="unitary-mixture")


def validate_channel(channel: QuantumChannel, tol: Tolerances = DEFAULT) -> ChannelValidation:
    """Residual report for trace preservation, unitality and (if weighted) unitarity."""
    n = channel.dim
    ident = np.eye(n)
    tp = np.zeros((n, n), dtype=np.complex128)
    un = np.zeros((n, n), dtype=np.complex128)
    for K in channel.kraus:
        tp += K.conj().T @ K
        un += K @ K.conj().T
    unitarity = 0.0
    weight_res = 0.0
    if channel.weights is not None:
        for K, w in zip(channel.kraus, channel.weights):
            U = K / np.sqrt(w)
            unitarity = max(unitarity, float(np.linalg.norm(U.conj().T @ U - ident)))
        weight_res = abs(sum(channel.weights) - 1.0)
    return ChannelValidation(
        trace_residual=float(np.linalg.norm(tp - ident)),
        unital_residual=float(np.linalg.norm(un - ident)),
        unitarity_residual=unitarity,
        weight_residual=weight_res,
        tolerance=tol.channel_residual,
    )


__all__ = [
    "ChannelValidation",
    "QuantumChannel",
    "apply_channel",
    "pinching_of",
    "random_unitary",
    "unitary_mixture",
    "validate_channel",
]

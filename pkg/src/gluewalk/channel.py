"""Phase damping on the coin subsystem.

The channel multiplies the density-matrix element with coin indices
``(l, l')`` by ``eta ** (l - l')**2`` and leaves position indices alone. The
truncated Kraus sum reaches the same map in the limit and is kept as an
independent check on the closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DEFAULT_KRAUS_TERMS",
    "PhaseDampingChannel",
    "apply_closed_form",
    "apply_kraus_truncated",
    "kraus_completeness_defect",
    "kraus_diagonals",
]

DEFAULT_KRAUS_TERMS = 40


@dataclass(frozen=True)
class PhaseDampingChannel:
    """Dephasing of strength ``eta`` on a ``dim``-dimensional coin.

    ``eta = 1`` is the identity; ``eta = 0`` erases every coin coherence.
    """

    eta: float
    dim: int = 3

    def __post_init__(self):
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"eta must lie in [0, 1], got {self.eta}")
        if self.dim < 1:
            raise ValueError(f"coin dimension must be >= 1, got {self.dim}")

    @classmethod
    def from_rate(cls, gamma: float, tau: float, dim: int = 3) -> PhaseDampingChannel:
        """Channel for phase-error rate ``gamma`` acting for time ``tau``."""
        return cls(math.exp(-gamma * tau), dim)

    @property
    def gamma_tau(self) -> float:
        return math.inf if self.eta == 0 else -math.log(self.eta)

    def coin_mask(self) -> np.ndarray:
        """``dim x dim`` factors ``eta ** (l - l')**2`` (with ``0 ** 0 = 1``)."""
        l = np.arange(self.dim)
        exponent = (l[:, None] - l[None, :]) ** 2
        return np.power(float(self.eta), exponent.astype(float))


def _as_blocks(rho: np.ndarray, dim: int) -> np.ndarray:
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] % dim:
        raise ValueError(f"density matrix of shape {rho.shape} incompatible with coin dimension {dim}")
    V = rho.shape[0] // dim
    return rho.reshape(V, dim, V, dim)


def apply_closed_form(rho: np.ndarray, channel: PhaseDampingChannel) -> np.ndarray:
    """Return a new density matrix with coin coherences damped."""
    D = channel.dim
    out = np.array(rho, dtype=np.complex128, copy=True)
    _as_blocks(out, D)[...] *= channel.coin_mask()[None, :, None, :]
    return out


def kraus_diagonals(channel: PhaseDampingChannel, terms: int) -> np.ndarray:
    """Coin-space diagonals of the first ``terms`` Kraus operators.

    Row ``k`` holds ``(l s)^k eta^(l^2) / sqrt(k!)`` for ``l = 0..dim-1`` with
    ``s = sqrt(-2 ln eta)``; each operator is ``1_p x diag(row)``.
    """
    if channel.eta == 0:
        raise ValueError("the Kraus form is undefined at eta = 0; use apply_closed_form")
    if terms < 1:
        raise ValueError(f"need at least one Kraus term, got {terms}")
    l = np.arange(channel.dim, dtype=float)
    s = math.sqrt(-2.0 * math.log(channel.eta))
    rows = np.empty((terms, channel.dim))
    rows[0] = channel.eta ** (l**2)
    for k in range(1, terms):
        rows[k] = rows[k - 1] * (l * s) / math.sqrt(k)
    return rows


def apply_kraus_truncated(
    rho: np.ndarray, channel: PhaseDampingChannel, terms: int = DEFAULT_KRAUS_TERMS
) -> np.ndarray:
    """``sum_{k < terms} E_k rho E_k^dag`` for the phase-damping Kraus set."""
    D = channel.dim
    blocks = _as_blocks(np.asarray(rho, dtype=np.complex128), D)
    out = np.zeros_like(blocks)
    for e in kraus_diagonals(channel, terms):
        out += e[None, :, None, None] * blocks * e[None, None, None, :]
    return out.reshape(rho.shape)


def kraus_completeness_defect(channel: PhaseDampingChannel, terms: int = DEFAULT_KRAUS_TERMS) -> float:
    """Max entrywise deviation of ``sum_{k < terms} E_k^dag E_k`` from identity."""
    rows = kraus_diagonals(channel, terms)
    return float(np.max(np.abs((rows**2).sum(axis=0) - 1.0)))

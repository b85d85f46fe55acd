"""Coined quantum walk evolution on port-labeled graphs.

States are plain numpy arrays over the position-coin basis with
``index(v, c) = v * k + c``: a 1-D vector for a pure state, a square matrix
for a density matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .graph import PortLabeledGraph

__all__ = [
    "Coin",
    "InitialCondition",
    "NonUnitaryCoinError",
    "check_state",
    "custom_coin",
    "default_initial_condition",
    "grover_coin",
    "grover_conditions",
    "hadamard_coin",
    "hadamard_line_walk",
    "initial_density",
    "initial_pure",
    "measure_positions",
    "shift_permutation",
    "step_density",
    "step_pure",
    "symmetric_coin_state",
]

UNITARY_TOL = 1e-12
NORM_TOL = 1e-10
DEFAULT_BETA = 0.638


class NonUnitaryCoinError(ValueError):
    def __init__(self, deviation: float):
        super().__init__(f"coin is not unitary: max |C^dag C - 1| = {deviation:.3e}")
        self.deviation = deviation


@dataclass(frozen=True, eq=False)
class Coin:
    """A k x k unitary acting on the coin space."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
            raise ValueError(f"coin must be a non-empty square matrix, got shape {m.shape}")
        deviation = float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))))
        if deviation > UNITARY_TOL:
            raise NonUnitaryCoinError(deviation)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def k(self) -> int:
        return self.matrix.shape[0]


def custom_coin(entries) -> Coin:
    return Coin(entries)


def grover_coin(k: int) -> Coin:
    """The Grover diffusion coin ``(2/k) J - 1``."""
    if k < 2:
        raise ValueError(f"Grover coin needs k >= 2, got {k}")
    return Coin(np.full((k, k), 2.0 / k) - np.eye(k))


def grover_conditions(a: complex, b: complex, k: int) -> tuple[float, float]:
    """Residuals of the two unitarity conditions on a Grover-type coin.

    A coin with ``a`` on the diagonal and ``b`` elsewhere is unitary iff both
    residuals vanish.
    """
    norm = abs(a) ** 2 + (k - 1) * abs(b) ** 2 - 1
    ortho = a * np.conj(b) + np.conj(a) * b + (k - 2) * abs(b) ** 2
    return float(abs(norm)), float(abs(ortho))


def hadamard_coin() -> Coin:
    return Coin(np.array([[1, 1], [1, -1]]) / math.sqrt(2))


@dataclass(frozen=True, eq=False)
class InitialCondition:
    """Walker localized on ``start`` with coin amplitudes ``amplitudes``."""

    start: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1) > NORM_TOL:
            raise ValueError(f"coin amplitudes must be normalized, |amps|^2 = {norm!r}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)


def symmetric_coin_state(beta: float) -> np.ndarray:
    """Real coin state ``(alpha, beta, beta)`` with ``alpha = sqrt(1 - 2 beta^2)``."""
    if not 0 <= beta <= math.sqrt(0.5) + 1e-15:
        raise ValueError(f"beta must lie in [0, 1/sqrt(2)], got {beta}")
    alpha = math.sqrt(max(0.0, 1 - 2 * beta * beta))
    return np.array([alpha, beta, beta])


def default_initial_condition(beta: float = DEFAULT_BETA, start: int = 0) -> InitialCondition:
    return InitialCondition(start, symmetric_coin_state(beta))


def initial_pure(graph: PortLabeledGraph, init: InitialCondition) -> np.ndarray:
    k = graph.degree
    if init.amplitudes.size != k:
        raise ValueError(f"initial coin has {init.amplitudes.size} amplitudes, graph degree is {k}")
    if not 0 <= init.start < graph.num_vertices:
        raise ValueError(f"start vertex {init.start} outside graph")
    psi = np.zeros(graph.dimension, dtype=np.complex128)
    psi[init.start * k : (init.start + 1) * k] = init.amplitudes
    return psi


def initial_density(graph: PortLabeledGraph, init: InitialCondition) -> np.ndarray:
    psi = initial_pure(graph, init)
    return np.outer(psi, psi.conj())


def shift_permutation(graph: PortLabeledGraph) -> np.ndarray:
    """The shift as an index map: basis state ``i`` moves to ``perm[i]``."""
    return graph.ports


def _check_dims(n: int, coin: Coin, graph: PortLabeledGraph):
    if coin.k != graph.degree:
        raise ValueError(f"coin dimension {coin.k} does not match graph degree {graph.degree}")
    if n != graph.dimension:
        raise ValueError(f"state dimension {n} does not match graph dimension {graph.dimension}")


def step_pure(psi: np.ndarray, coin: Coin, graph: PortLabeledGraph) -> np.ndarray:
    """One step ``psi <- S (1 x C) psi``."""
    _check_dims(psi.shape[0], coin, graph)
    k = coin.k
    coined = (psi.reshape(-1, k) @ coin.matrix.T).reshape(-1)
    out = np.empty_like(coined)
    out[graph.ports] = coined
    return out


def step_density(
    rho: np.ndarray, coin: Coin, graph: PortLabeledGraph, out: np.ndarray | None = None
) -> np.ndarray:
    """One step ``rho <- U rho U^dag`` with ``U = S (1 x C)``."""
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {rho.shape}")
    _check_dims(rho.shape[0], coin, graph)
    ones = np.ones((coin.k, coin.k))
    return kernels.dephased_step(rho, coin.matrix, graph.ports, ones, out=out)


def measure_positions(state: np.ndarray, k: int) -> np.ndarray:
    """Vertex probabilities ``P(v) = sum_c <v,c| rho |v,c>``.

    Accepts a pure vector or a density matrix. Round-off negatives are
    clamped to zero.
    """
    if state.ndim == 1:
        diag = np.abs(state) ** 2
    elif state.ndim == 2:
        diag = np.diagonal(state).real
    else:
        raise ValueError(f"state must be 1-D or 2-D, got {state.ndim}-D")
    p = diag.reshape(-1, k).sum(axis=1)
    return np.clip(p, 0.0, None)


def check_state(state: np.ndarray, atol: float = NORM_TOL) -> list[str]:
    """Return violated state invariants (norm/trace, Hermiticity, positivity)."""
    problems = []
    if state.ndim == 1:
        norm = float(np.vdot(state, state).real)
        if abs(norm - 1) > atol:
            problems.append(f"norm {norm!r} != 1")
        return problems
    tr = complex(np.trace(state))
    if abs(tr - 1) > atol:
        problems.append(f"trace {tr!r} != 1")
    herm = float(np.max(np.abs(state - state.conj().T)))
    if herm > 1e-12:
        problems.append(f"not Hermitian: max deviation {herm:.3e}")
    low = float(np.linalg.eigvalsh((state + state.conj().T) / 2).min())
    if low < -1e-9:
        problems.append(f"negative eigenvalue {low:.3e}")
    return problems


def hadamard_line_walk(steps: int, initial: InitialCondition | None = None) -> np.ndarray:
    """Hadamard walk on the integer line.

    Coin 0 moves left, coin 1 moves right. ``initial.start`` is the starting
    position (normally 0). Returns probabilities for positions
    ``start - steps .. start + steps``.
    """
    if steps < 0:
        raise ValueError("steps must be >= 0")
    if initial is None:
        initial = InitialCondition(0, [1, 0])
    if initial.amplitudes.size != 2:
        raise ValueError("line walk needs a two-dimensional coin")
    H = hadamard_coin().matrix
    psi = np.zeros((2 * steps + 1, 2), dtype=np.complex128)
    psi[steps] = initial.amplitudes
    for _ in range(steps):
        psi = psi @ H.T
        left = np.roll(psi[:, 0], -1)
        right = np.roll(psi[:, 1], 1)
        psi = np.stack([left, right], axis=1)
    return (np.abs(psi) ** 2).sum(axis=1)

"""Walk experiments on glued-trees graphs: traces, scans and baselines."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .channel import PhaseDampingChannel
from .graph import GluedTreesSpec, PortLabeledGraph, build_glued_trees
from .walk import (
    Coin,
    InitialCondition,
    default_initial_condition,
    grover_coin,
    initial_density,
    initial_pure,
    measure_positions,
    step_pure,
    symmetric_coin_state,
)

__all__ = [
    "DEFAULT_ETAS",
    "CoinOptimum",
    "ExperimentConfig",
    "LayerScanRow",
    "ProbabilityTrace",
    "classical_baseline",
    "eta_scan",
    "first_arrival",
    "layer_scan",
    "optimize_initial_coin",
    "peak_filter",
    "run_walk",
    "target_curve",
]

DEFAULT_ETAS = (1.0, 0.95, 0.9, 0.85, 0.8)
DEFAULT_MAX_BYTES = 4 * 2**30


@dataclass(frozen=True)
class ExperimentConfig:
    graph: GluedTreesSpec
    steps: int
    etas: tuple[float, ...] = DEFAULT_ETAS
    initial: InitialCondition = field(default_factory=default_initial_condition)
    threshold: float = 0.05
    peak_fraction: float = 0.25

    def __post_init__(self):
        object.__setattr__(self, "etas", tuple(float(e) for e in self.etas))
        if self.steps < 1:
            raise ValueError(f"steps must be >= 1, got {self.steps}")
        if not self.etas:
            raise ValueError("eta list is empty")
        for eta in self.etas:
            if not 0.0 <= eta <= 1.0:
                raise ValueError(f"eta must lie in [0, 1], got {eta}")
        if not 0 < self.threshold < 1:
            raise ValueError(f"threshold must lie in (0, 1), got {self.threshold}")


@dataclass(frozen=True, eq=False)
class ProbabilityTrace:
    """Vertex probabilities ``probabilities[eta_index, t, v]`` for t = 0..T."""

    config: ExperimentConfig
    probabilities: np.ndarray = field(repr=False)

    @property
    def etas(self) -> tuple[float, ...]:
        return self.config.etas

    @property
    def steps(self) -> int:
        return self.probabilities.shape[1] - 1

    @property
    def target(self) -> int:
        return self.config.graph.target

    def eta_index(self, eta: float) -> int:
        for i, e in enumerate(self.etas):
            if math.isclose(e, eta, rel_tol=0, abs_tol=1e-12):
                return i
        raise KeyError(f"eta {eta} not in trace {self.etas}")

    def for_eta(self, eta: float) -> np.ndarray:
        """``(T + 1, V)`` table for one eta."""
        return self.probabilities[self.eta_index(eta)]


def _memory_estimate(dim: int) -> int:
    buffers = 2 if kernels.BACKEND == "numba" else 5
    return buffers * dim * dim * 16


def _density_history(graph, coin, init, steps, eta, backend=None) -> np.ndarray:
    k = graph.degree
    mask = PhaseDampingChannel(eta, k).coin_mask()
    rho = initial_density(graph, init)
    spare = np.empty_like(rho)
    history = np.empty((steps + 1, graph.num_vertices))
    history[0] = measure_positions(rho, k)
    for t in range(1, steps + 1):
        kernels.dephased_step(rho, coin.matrix, graph.ports, mask, out=spare, backend=backend)
        rho, spare = spare, rho
        history[t] = measure_positions(rho, k)
    return history


def _pure_history(graph, coin, init, steps) -> np.ndarray:
    psi = initial_pure(graph, init)
    history = np.empty((steps + 1, graph.num_vertices))
    history[0] = measure_positions(psi, graph.degree)
    for t in range(1, steps + 1):
        psi = step_pure(psi, coin, graph)
        history[t] = measure_positions(psi, graph.degree)
    return history


def run_walk(
    config: ExperimentConfig,
    *,
    coin: Coin | None = None,
    pure_fast_path: bool = True,
    backend: str | None = None,
) -> ProbabilityTrace:
    """Evolve the walk for every eta in ``config`` and record ``P(v, t)``.

    Each step is the unitary coin-shift followed by the dephasing channel;
    no channel acts before the first step. With ``pure_fast_path`` the
    ideal walk (eta = 1) is run as a state vector.
    """
    graph = build_glued_trees(config.graph)
    coin = coin or grover_coin(graph.degree)
    rows = []
    for eta in config.etas:
        if eta == 1.0 and pure_fast_path:
            rows.append(_pure_history(graph, coin, config.initial, config.steps))
        else:
            rows.append(_density_history(graph, coin, config.initial, config.steps, eta, backend))
    return ProbabilityTrace(config, np.stack(rows))


def target_curve(trace: ProbabilityTrace) -> dict[float, np.ndarray]:
    """Target-vertex probability over t = 0..T, keyed by eta."""
    return {eta: trace.probabilities[i, :, trace.target].copy() for i, eta in enumerate(trace.etas)}


def first_arrival(curve: np.ndarray, threshold: float = 0.05) -> int | None:
    """First step where the curve reaches ``threshold``, or None."""
    hits = np.flatnonzero(np.asarray(curve) >= threshold)
    return int(hits[0]) if hits.size else None


def eta_scan(
    spec: GluedTreesSpec,
    steps,
    etas=DEFAULT_ETAS,
    initial: InitialCondition | None = None,
) -> dict[int, np.ndarray]:
    """Target probability versus eta at each requested step.

    Returns ``{step: array aligned with etas}``.
    """
    steps = sorted({int(t) for t in steps})
    if not steps or steps[0] < 0:
        raise ValueError("need at least one non-negative step")
    config = ExperimentConfig(
        spec, max(1, steps[-1]), tuple(etas), initial or default_initial_condition()
    )
    curves = target_curve(run_walk(config))
    return {t: np.array([curves[eta][t] for eta in config.etas]) for t in steps}


def peak_filter(
    trace: ProbabilityTrace, eta: float, t: int, fraction: float | None = None
) -> list[tuple[int, float]]:
    """Vertices with probability above ``fraction`` times the target's.

    Sorted by probability, highest first (ties by vertex index). The target
    passes its own filter whenever its probability is positive.
    """
    if fraction is None:
        fraction = trace.config.peak_fraction
    p = trace.for_eta(eta)[t]
    cut = fraction * p[trace.target]
    keep = np.flatnonzero(p > cut)
    order = sorted(keep, key=lambda v: (-p[v], v))
    return [(int(v), float(p[v])) for v in order]


@dataclass(frozen=True)
class CoinOptimum:
    alpha: float
    beta: float
    peak_probability: float
    peak_step: int


def _basis_target_amplitudes(graph, coin, start, target, steps) -> np.ndarray:
    """Target amplitudes ``A[t, c, b]`` when starting from coin basis state b."""
    k = graph.degree
    amps = np.empty((steps + 1, k, k), dtype=np.complex128)
    for b in range(k):
        psi = np.zeros(graph.dimension, dtype=np.complex128)
        psi[start * k + b] = 1.0
        amps[0, :, b] = psi[target * k : (target + 1) * k]
        for t in range(1, steps + 1):
            psi = step_pure(psi, coin, graph)
            amps[t, :, b] = psi[target * k : (target + 1) * k]
    return amps


def optimize_initial_coin(
    spec: GluedTreesSpec, steps: int, betas=None
) -> CoinOptimum:
    """Grid search over coin states ``(alpha, beta, beta)`` for the ideal walk.

    Maximizes the largest target probability over steps 0..``steps``. The
    default grid is ``beta = 0, 0.001, ..., 0.707``; ties go to the smaller
    beta. Uses linearity: three basis walks determine every coin state.
    """
    if betas is None:
        betas = np.round(np.arange(0.0, math.sqrt(0.5), 1e-3), 3)
    betas = np.sort(np.asarray(betas, dtype=float))
    graph = build_glued_trees(spec)
    amps = _basis_target_amplitudes(graph, grover_coin(3), spec.start, spec.target, steps)
    coins = np.stack([symmetric_coin_state(b) for b in betas], axis=1)  # (3, nbeta)
    probs = (np.abs(amps @ coins) ** 2).sum(axis=1)  # (T + 1, nbeta)
    peaks = probs.max(axis=0)
    best = int(np.argmax(peaks))
    beta = float(betas[best])
    return CoinOptimum(
        alpha=float(coins[0, best]),
        beta=beta,
        peak_probability=float(peaks[best]),
        peak_step=int(np.argmax(probs[:, best])),
    )


@dataclass(frozen=True)
class LayerScanRow:
    eta: float
    n: int
    peak_step: int
    peak_probability: float
    beta: float


def layer_scan(
    ns=range(4, 9),
    etas=DEFAULT_ETAS,
    *,
    optimize_coin: bool = True,
    beta: float | None = None,
    max_bytes: int = DEFAULT_MAX_BYTES,
) -> list[LayerScanRow]:
    """Peak target probability against tree depth for each eta.

    Each depth ``n`` runs ``3n + 10`` steps. With ``optimize_coin`` the
    initial coin is re-optimized per depth on the ideal walk; otherwise
    ``beta`` (default 0.638) is used everywhere. Rows come out ordered by
    eta as given, then n.
    """
    etas = tuple(float(e) for e in etas)
    ns = list(ns)
    if not etas:
        raise ValueError("eta grid is empty")
    if not ns:
        raise ValueError("layer range is empty")
    for n in ns:
        dim = 3 * GluedTreesSpec(n).num_vertices
        need = _memory_estimate(dim)
        if need > max_bytes:
            raise MemoryError(
                f"depth {n} needs about {need / 2**30:.1f} GiB for its density matrices, "
                f"over the {max_bytes / 2**30:.1f} GiB limit"
            )
    cells = {}
    for n in ns:
        spec = GluedTreesSpec(n)
        steps = 3 * n + 10
        if optimize_coin:
            b = optimize_initial_coin(spec, steps).beta
        else:
            b = 0.638 if beta is None else beta
        trace = run_walk(ExperimentConfig(spec, steps, etas, default_initial_condition(b)))
        for eta, curve in target_curve(trace).items():
            t = int(np.argmax(curve))
            cells[eta, n] = LayerScanRow(eta, n, t, float(curve[t]), b)
    return [cells[eta, n] for eta in etas for n in ns]


def classical_baseline(spec: GluedTreesSpec | PortLabeledGraph, steps: int, start: int = 0) -> np.ndarray:
    """Exact distribution of the classical random walk, shape ``(steps + 1, V)``.

    Every step moves along each port with probability ``1/k``; a self loop
    keeps the walker in place.
    """
    graph = spec if isinstance(spec, PortLabeledGraph) else build_glued_trees(spec)
    if steps < 0:
        raise ValueError("steps must be >= 0")
    k = graph.degree
    dest = graph.ports // k
    history = np.zeros((steps + 1, graph.num_vertices))
    history[0, start] = 1.0
    for t in range(1, steps + 1):
        outflow = np.repeat(history[t - 1] / k, k)
        history[t] = np.bincount(dest, weights=outflow, minlength=graph.num_vertices)
    return history

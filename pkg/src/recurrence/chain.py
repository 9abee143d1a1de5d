"""
(δ, R)-chain graphs on finite node sets and nonwandering probes.

An edge i → j exists when some sampled time t ∈ [R, t_max] has
‖T(t)x_i - x_j‖ < δ. Only finitely many times are tested, so the graph
under-approximates chain reachability; recurrence found here is a
resolution-qualified diagnostic.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Dict, Tuple

import numpy as np
import pandas as pd
from loguru import logger
from scipy import sparse
from scipy.sparse import csgraph
from scipy.spatial.distance import cdist

from ..dynamics.semigroup import Semigroup
from ..dynamics.vectors import VectorLike, as_vector, random_unit_vectors
from ..exceptions import DimensionMismatchError, InvalidParameterError, OffGridError, OutOfRangeError
from ..utils.constants import (
    DEFAULT_CHAIN_TIME_SAMPLES,
    DEFAULT_PROBE_COUNT,
    DEFAULT_PROBE_TIMES,
    PROBE_LADDER_FLOOR,
)
from ..utils.serialization import vector_to_json

# Nodes closer than this to 0 count as the origin
ORIGIN_TOL = 1e-12


def box_grid(lower: float, upper: float, step: float, dim: int = 2) -> np.ndarray:
    """Tensor grid of [lower, upper]^dim with spacing ``step``."""
    if upper <= lower or step <= 0:
        raise InvalidParameterError(f"Bad box grid [{lower}, {upper}] with step {step}")
    count = int(round((upper - lower) / step)) + 1
    axis = np.linspace(lower, upper, count)
    axis[np.abs(axis) < ORIGIN_TOL] = 0.0
    mesh = np.meshgrid(*([axis] * dim), indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1).astype(complex)


def circle_grid(radius: float, count: int) -> np.ndarray:
    """``count`` equally spaced points on the circle of the given radius in R²."""
    angles = 2.0 * np.pi * np.arange(count) / count
    return np.stack((radius * np.cos(angles), radius * np.sin(angles)), axis=1).astype(complex)


def sample_times(T: Semigroup, R: float, t_max: float, n_times: int, log_spaced: bool = True) -> np.ndarray:
    """Times in [R, t_max], snapped up to the lattice for grid models."""
    if R <= 0 or t_max < R:
        raise InvalidParameterError(f"Need 0 < R <= t_max, got R={R}, t_max={t_max}")
    raw = np.geomspace(R, t_max, n_times) if log_spaced else np.linspace(R, t_max, n_times)
    if T.time_grid is None:
        return np.unique(raw)
    snapped = np.array([T.snap_up(t) for t in raw])
    snapped = snapped[snapped <= t_max * (1.0 + T.grid_tol)]
    if snapped.size == 0:
        raise OffGridError(f"No multiple of h={T.time_grid} lies in [{R}, {t_max}]")
    return np.unique(snapped)


def _real_embedding(points: np.ndarray) -> np.ndarray:
    return np.hstack((points.real, points.imag))


@dataclass
class ChainGraph:
    """Nodes, the sparse edge relation and its strongly connected components."""

    nodes: np.ndarray
    adjacency: sparse.csr_matrix
    delta: float
    R: float
    t_max: float
    times: np.ndarray
    origin_index: int
    n_components: int
    component_labels: np.ndarray

    @property
    def n_nodes(self) -> int:
        return int(self.nodes.shape[0])

    def edges(self) -> np.ndarray:
        """(source, target) rows in row-major order."""
        coo = self.adjacency.tocoo()
        order = np.lexsort((coo.col, coo.row))
        return np.stack((coo.row[order], coo.col[order]), axis=1)

    def successors(self, i: int) -> np.ndarray:
        row = self.adjacency.getrow(i)
        return np.sort(row.indices)

    def has_self_loop(self, i: int) -> bool:
        return bool(self.adjacency[i, i])

    def recurrent_indices(self) -> np.ndarray:
        """Nodes on a cycle: in a nontrivial SCC or carrying a self-loop."""
        sizes = np.bincount(self.component_labels, minlength=self.n_components)
        on_cycle = sizes[self.component_labels] > 1
        on_cycle |= self.adjacency.diagonal().astype(bool)
        return np.flatnonzero(on_cycle)

    def edge_frame(self) -> pd.DataFrame:
        edges = self.edges()
        return pd.DataFrame({"source": edges[:, 0], "target": edges[:, 1]})

    def to_adjacency_json(self) -> Dict[str, Any]:
        return {
            "delta": self.delta,
            "R": self.R,
            "t_max": self.t_max,
            "times": [float(t) for t in self.times],
            "origin_index": self.origin_index,
            "nodes": [vector_to_json(x) for x in self.nodes],
            "adjacency": {str(i): [int(j) for j in self.successors(i)] for i in range(self.n_nodes)},
        }


def _with_origin(nodes: np.ndarray) -> Tuple[np.ndarray, int]:
    norms = np.linalg.norm(nodes, axis=1)
    nearest = int(np.argmin(norms))
    if norms[nearest] <= ORIGIN_TOL:
        return nodes, nearest
    logger.debug("Chain grid lacks the origin; appending it")
    return np.vstack((nodes, np.zeros((1, nodes.shape[1]), dtype=complex))), nodes.shape[0]


def build_chain_graph(
    T: Semigroup,
    grid: np.ndarray,
    delta: float,
    R: float,
    t_max: float,
    n_times: int = DEFAULT_CHAIN_TIME_SAMPLES,
    max_workers: int = 4,
) -> ChainGraph:
    """Edges from sampled on-grid times; row blocks are scanned concurrently."""
    if delta <= 0:
        raise InvalidParameterError(f"delta must be positive, got {delta}")
    nodes = np.atleast_2d(np.asarray(grid, dtype=complex))
    if nodes.shape[1] != T.dim:
        raise DimensionMismatchError(f"Grid points have dimension {nodes.shape[1]}, model has {T.dim}")
    nodes, origin = _with_origin(nodes)
    times = sample_times(T, R, t_max, n_times)
    maps = [T.matrix(t) for t in times]
    targets = _real_embedding(nodes)

    def scan(rows: np.ndarray) -> np.ndarray:
        hit = np.zeros((rows.size, nodes.shape[0]), dtype=bool)
        for M in maps:
            images = _real_embedding(nodes[rows] @ M.T)
            hit |= cdist(images, targets) < delta
        return hit

    blocks = np.array_split(np.arange(nodes.shape[0]), max(1, min(max_workers, nodes.shape[0])))
    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        hits = list(executor.map(scan, blocks))
    adjacency = sparse.csr_matrix(np.vstack(hits))

    n_components, labels = csgraph.connected_components(adjacency, directed=True, connection="strong")
    graph = ChainGraph(
        nodes=nodes,
        adjacency=adjacency,
        delta=float(delta),
        R=float(R),
        t_max=float(t_max),
        times=times,
        origin_index=origin,
        n_components=int(n_components),
        component_labels=labels,
    )
    logger.info(
        f"Chain graph on {graph.n_nodes} nodes: {adjacency.nnz} edges, {n_components} components"
    )
    return graph


def chain_recurrent_set(
    T: Semigroup,
    grid: np.ndarray,
    delta: float,
    R: float,
    t_max: float,
    n_times: int = DEFAULT_CHAIN_TIME_SAMPLES,
    max_workers: int = 4,
) -> np.ndarray:
    """Grid points lying on a (δ, R)-chain cycle."""
    graph = build_chain_graph(T, grid, delta, R, t_max, n_times=n_times, max_workers=max_workers)
    return graph.nodes[graph.recurrent_indices()]


def chain_related(graph: ChainGraph, i: int, j: int) -> bool:
    """A (δ, R)-chain of at least one step leads from node i to node j."""
    for k in (i, j):
        if not 0 <= k < graph.n_nodes:
            raise OutOfRangeError(f"Node {k} outside 0..{graph.n_nodes - 1}")
    if i == j:
        return bool(i in set(graph.recurrent_indices()))
    dist = csgraph.shortest_path(graph.adjacency, directed=True, unweighted=True, indices=i)
    return bool(np.isfinite(dist[j]))


def _probe_points(
    x: np.ndarray, epsilon_nbhd: float, n_probe: int, seed: int
) -> np.ndarray:
    """
    x plus x + f_j·2^k·d_j for every 2^k < ε with fixed directions d_j and
    fractions f_j ∈ (0, 1]; the set only grows with ε.
    """
    rng = np.random.default_rng(seed)
    directions = random_unit_vectors(rng, n_probe, x.size)
    fractions = rng.uniform(0.05, 1.0, size=n_probe)
    top = int(np.ceil(np.log2(epsilon_nbhd)))
    radii = 2.0 ** np.arange(PROBE_LADDER_FLOOR, top + 1)
    radii = radii[radii < epsilon_nbhd]
    offsets = (radii[:, None, None] * fractions[None, :, None] * directions[None, :, :]).reshape(-1, x.size)
    return np.vstack((x[None, :], x[None, :] + offsets))


def is_nonwandering(
    x: VectorLike,
    T: Semigroup,
    epsilon_nbhd: float,
    R: float,
    t_max: float,
    n_probe: int = DEFAULT_PROBE_COUNT,
    n_times: int = DEFAULT_PROBE_TIMES,
    seed: int = 0,
) -> bool:
    """
    Whether some probe y in the ε-ball around x has T(t)y back in the ball for
    a sampled t ∈ [R, t_max]. False means no return was detected at this
    resolution.
    """
    if epsilon_nbhd <= 0:
        raise InvalidParameterError(f"epsilon_nbhd must be positive, got {epsilon_nbhd}")
    x = as_vector(x, dim=T.dim)
    probes = _probe_points(x, epsilon_nbhd, n_probe, seed)
    uniform = sample_times(T, R, t_max, n_times, log_spaced=False)
    times = np.union1d(uniform, sample_times(T, R, t_max, DEFAULT_CHAIN_TIME_SAMPLES))
    for t in times:
        images = probes @ T.matrix(t).T
        distances = np.linalg.norm(images - x[None, :], axis=1)
        if np.any(distances < epsilon_nbhd):
            logger.debug(f"Return to the {epsilon_nbhd:g}-ball detected at t={t:.6g}")
            return True
    return False

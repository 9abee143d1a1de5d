"""
Tests for chain graphs, chain recurrence and the nonwandering probe.
"""

import numpy as np
import pytest

from src.dynamics.systems import make_rotation, make_transport
from src.exceptions import DimensionMismatchError, InvalidParameterError, OutOfRangeError
from src.recurrence.chain import (
    box_grid,
    build_chain_graph,
    chain_recurrent_set,
    chain_related,
    circle_grid,
    is_nonwandering,
    sample_times,
)


@pytest.mark.unit
class TestGrids:
    """Test node set construction."""

    def test_box_grid_contains_origin(self):
        """Test [-1, 1]² with step 0.5 has 25 nodes including 0."""
        nodes = box_grid(-1.0, 1.0, 0.5)
        assert nodes.shape == (25, 2)
        assert np.any(np.all(nodes == 0, axis=1))

    def test_circle_grid(self):
        """Test points lie on the circle."""
        nodes = circle_grid(2.0, 12)
        assert np.allclose(np.linalg.norm(nodes, axis=1), 2.0)

    def test_bad_box(self):
        """Test empty boxes are rejected."""
        with pytest.raises(InvalidParameterError):
            box_grid(1.0, -1.0, 0.1)

    def test_lattice_sample_times(self):
        """Test times are snapped onto the lattice inside [R, t_max]."""
        T = make_transport(1.0, 8, 0.25)
        times = sample_times(T, 0.3, 2.0, 10)
        assert np.allclose(times / 0.25, np.round(times / 0.25))
        assert times.min() >= 0.3 and times.max() <= 2.0


@pytest.mark.unit
class TestChainGraph:
    """Test (δ, R)-chain graphs."""

    def test_saddle_only_origin(self, saddle):
        """Test only 0 is chain recurrent for a hyperbolic saddle."""
        graph = build_chain_graph(saddle, box_grid(-1.0, 1.0, 0.1), 0.02, 1.0, 10.0)
        recurrent = graph.recurrent_indices()
        assert list(recurrent) == [graph.origin_index]
        assert graph.has_self_loop(graph.origin_index)

    def test_origin_appended(self, saddle):
        """Test a grid without 0 gets the origin as an extra node."""
        nodes = np.array([[0.5, 0.5], [-0.5, 0.25]])
        graph = build_chain_graph(saddle, nodes, 0.02, 1.0, 5.0)
        assert graph.n_nodes == 3
        assert graph.origin_index == 2
        assert np.all(graph.nodes[2] == 0)

    def test_rotation_circle_recurrent(self):
        """Test every node of a circle is recurrent under the rotation."""
        nodes = circle_grid(1.0, 36)
        graph = build_chain_graph(make_rotation(1.0), nodes, 0.2, 1.0, 2 * np.pi, n_times=64)
        recurrent = set(graph.recurrent_indices())
        assert set(range(36)) <= recurrent

    def test_chain_recurrent_set(self, saddle):
        """Test the point set form returns the origin for the saddle."""
        points = chain_recurrent_set(saddle, box_grid(-1.0, 1.0, 0.25), 0.02, 1.0, 10.0)
        assert points.shape == (1, 2)
        assert np.allclose(points, 0.0)

    def test_chain_related(self, saddle):
        """Test reachability between nodes."""
        graph = build_chain_graph(saddle, box_grid(-1.0, 1.0, 0.25), 0.02, 1.0, 10.0)
        origin = graph.origin_index
        assert chain_related(graph, origin, origin)
        stable_point = int(np.flatnonzero(np.all(np.isclose(graph.nodes, [0.25, 0.0]), axis=1))[0])
        assert chain_related(graph, stable_point, origin)
        assert not chain_related(graph, origin, stable_point)
        with pytest.raises(OutOfRangeError):
            chain_related(graph, origin, graph.n_nodes)

    def test_edges_and_frame(self, saddle):
        """Test edges come out sorted and match the frame."""
        graph = build_chain_graph(saddle, box_grid(-1.0, 1.0, 0.5), 0.02, 1.0, 10.0)
        edges = graph.edges()
        assert np.array_equal(edges, edges[np.lexsort((edges[:, 1], edges[:, 0]))])
        frame = graph.edge_frame()
        assert list(frame.columns) == ["source", "target"]
        assert len(frame) == graph.adjacency.nnz

    def test_dimension_mismatch(self, saddle):
        """Test grid points must match the model."""
        with pytest.raises(DimensionMismatchError):
            build_chain_graph(saddle, np.zeros((3, 3)), 0.02, 1.0, 5.0)

    def test_delta_must_be_positive(self, saddle):
        """Test δ ≤ 0 is rejected."""
        with pytest.raises(InvalidParameterError):
            build_chain_graph(saddle, box_grid(-1.0, 1.0, 0.5), 0.0, 1.0, 5.0)


@pytest.mark.unit
class TestNonwandering:
    """Test the nonwandering probe."""

    def test_origin_of_saddle(self, saddle):
        """Test 0 is nonwandering."""
        assert is_nonwandering([0.0, 0.0], saddle, 0.1, 1.0, 10.0)

    def test_saddle_point_wanders(self, saddle):
        """Test a point off the origin has no detected return."""
        assert not is_nonwandering([0.5, 0.5], saddle, 0.1, 1.0, 10.0)

    def test_rotation_point_returns(self):
        """Test points on a rotation orbit come back."""
        assert is_nonwandering([1.0, 0.0], make_rotation(1.0), 0.05, 1.0, 10.0)

    def test_monotone_in_epsilon(self, saddle):
        """Test a return detected at ε persists at 2ε."""
        x = [0.05, 0.0]
        for eps in (0.01, 0.1, 0.2):
            if is_nonwandering(x, saddle, eps, 1.0, 10.0):
                assert is_nonwandering(x, saddle, 2 * eps, 1.0, 10.0)

    def test_invalid_radius(self, saddle):
        """Test ε ≤ 0 is rejected."""
        with pytest.raises(InvalidParameterError):
            is_nonwandering([0.0, 0.0], saddle, 0.0, 1.0, 10.0)

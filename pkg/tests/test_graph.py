import numpy as np
import pytest

from edgemind.clustering import build_transition_graph, normalized_laplacian, spectral_embed, transition_matrix, weight_graph
from edgemind.errors import ConfigError, DataError, ShapeError
from edgemind.models.telemetry import HandoverCounts


def random_counts(n, seed=0, density=0.6):
    rng = np.random.default_rng(seed)
    counts = rng.integers(1, 20, size=(n, n)) * (rng.random((n, n)) < density)
    np.fill_diagonal(counts, 0)
    # a ring keeps the graph connected
    for i in range(n):
        counts[i, (i + 1) % n] += 1
    return counts


def test_transition_rows_sum_to_one_or_zero():
    counts = random_counts(8)
    counts[3] = 0
    H = transition_matrix(counts)
    sums = H.sum(axis=1)
    assert sums[3] == 0
    assert np.allclose(np.delete(sums, 3), 1.0)


def test_transition_accepts_handover_counts():
    counts = HandoverCounts(0, 60, np.array([[0, 2], [0, 0]]))
    assert transition_matrix(counts).tolist() == [[0.0, 1.0], [0.0, 0.0]]


def test_weights_symmetric_with_zero_diagonal():
    W = weight_graph(transition_matrix(random_counts(7, seed=4)))
    assert np.allclose(W, W.T)
    assert np.all(np.diag(W) == 0)


def test_two_station_graph():
    graph = build_transition_graph(np.array([[0, 3], [1, 0]]))
    assert graph.H.tolist() == [[0.0, 1.0], [1.0, 0.0]]
    assert graph.W.tolist() == [[0.0, 2.0], [2.0, 0.0]]
    assert graph.D.tolist() == [2.0, 2.0]
    assert np.allclose(graph.L, [[1.0, -1.0], [-1.0, 1.0]])


def test_isolated_station_gets_unit_row():
    counts = random_counts(5)
    counts[2, :] = 0
    counts[:, 2] = 0
    L, D = normalized_laplacian(weight_graph(transition_matrix(counts)))
    assert D[2] == 0
    assert np.allclose(L[2], np.eye(5)[2])


def test_two_components_give_two_zero_eigenvalues():
    block = np.ones((3, 3), dtype=int) - np.eye(3, dtype=int)
    counts = np.zeros((6, 6), dtype=int)
    counts[:3, :3] = block
    counts[3:, 3:] = block
    graph = build_transition_graph(counts)
    embedding = spectral_embed(graph.L, graph.D, 3)
    assert np.allclose(embedding.eigenvalues[:2], 0.0, atol=1e-10)
    assert embedding.eigenvalues[2] > 0.5


def test_eigenpairs_of_random_walk_laplacian():
    graph = build_transition_graph(random_counts(12, seed=7))
    embedding = spectral_embed(graph.L, graph.D, 4)
    U, values = embedding.U, embedding.eigenvalues
    residual = graph.L @ U - U * values[None, :]
    assert np.abs(residual).max() < 1e-8
    assert np.allclose(np.linalg.norm(U, axis=0), 1.0)
    assert list(values) == sorted(values)


def test_single_cluster_embedding_is_constant():
    graph = build_transition_graph(random_counts(9, seed=2))
    U = spectral_embed(graph.L, graph.D, 1).U
    assert U.shape == (9, 1)
    assert np.allclose(U[:, 0], 1 / 3)


def test_rejects_negative_counts():
    with pytest.raises(DataError):
        transition_matrix(np.array([[0, -1], [1, 0]]))


def test_rejects_non_square():
    with pytest.raises(ShapeError):
        transition_matrix(np.zeros((2, 3)))


@pytest.mark.parametrize("n_clusters", [0, 5])
def test_rejects_cluster_count_out_of_range(n_clusters):
    graph = build_transition_graph(random_counts(4))
    with pytest.raises(ConfigError):
        spectral_embed(graph.L, graph.D, n_clusters)

"""Transition matrix, weighted graph, Laplacian and spectral embedding."""
import logging
from typing import Tuple, Union

import numpy as np
from scipy import linalg

from edgemind.errors import ConfigError, ConvergenceError, DataError, ShapeError
from edgemind.models.clustering import SpectralEmbedding, TransitionGraph
from edgemind.models.telemetry import HandoverCounts

logger = logging.getLogger(__name__)


def _square(matrix: np.ndarray, name: str) -> np.ndarray:
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ShapeError(f"{name} must be a square matrix, got shape {matrix.shape}")
    return matrix


def transition_matrix(counts: Union[HandoverCounts, np.ndarray]) -> np.ndarray:
    """
    Row-normalize handover counts: H(i, j) = N(i, j) / sum_j N(i, j), or 0 for rows without handovers.
    """
    raw = counts.counts if isinstance(counts, HandoverCounts) else counts
    matrix = _square(raw, "handover counts")
    if (matrix < 0).any():
        raise DataError("handover counts must be non-negative")
    totals = matrix.sum(axis=1, keepdims=True)
    return np.divide(matrix, totals, out=np.zeros_like(matrix), where=totals > 0)


def weight_graph(H: np.ndarray) -> np.ndarray:
    """Symmetric weights W(i, j) = H(i, j) + H(j, i) with a zero diagonal."""
    H = _square(H, "H")
    W = H + H.T
    np.fill_diagonal(W, 0.0)
    return W


def normalized_laplacian(W: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Random-walk Laplacian L = I - D^-1 W and the degree vector D.

    Isolated stations (zero degree) are given unit degree, so their row of L
    is the unit vector e_i; the returned D keeps the true zero degree.
    """
    W = _square(W, "W")
    D = W.sum(axis=1)
    effective = np.where(D > 0, D, 1.0)
    L = np.eye(len(D)) - W / effective[:, None]
    return L, D


def spectral_embed(L: np.ndarray, D: np.ndarray, n_clusters: int) -> SpectralEmbedding:
    """
    Eigenvectors of L for its ``n_clusters`` smallest eigenvalues.

    Solved on the symmetric form L_sym = D^1/2 L D^-1/2 = I - D^-1/2 W D^-1/2
    and mapped back with u = D^-1/2 u_sym. Columns have unit norm and their
    largest-magnitude entry is positive.
    """
    L = _square(L, "L")
    n = L.shape[0]
    if not 1 <= n_clusters <= n:
        raise ConfigError(f"n_clusters must be in 1..{n}, got {n_clusters}")

    root = np.sqrt(np.where(np.asarray(D) > 0, D, 1.0))
    L_sym = L * root[:, None] / root[None, :]
    L_sym = (L_sym + L_sym.T) / 2
    try:
        eigenvalues, vectors = linalg.eigh(L_sym, subset_by_index=[0, n_clusters - 1])
    except (linalg.LinAlgError, ValueError) as e:
        raise ConvergenceError(f"Error computing the Laplacian spectrum: {e}") from e

    U = vectors / root[:, None]
    U /= np.linalg.norm(U, axis=0, keepdims=True)
    pivots = np.argmax(np.abs(U), axis=0)
    U *= np.sign(U[pivots, np.arange(U.shape[1])])
    logger.debug("Smallest Laplacian eigenvalues: %s", np.round(eigenvalues, 6))
    return SpectralEmbedding(U=U, eigenvalues=eigenvalues)


def build_transition_graph(counts: Union[HandoverCounts, np.ndarray]) -> TransitionGraph:
    H = transition_matrix(counts)
    W = weight_graph(H)
    L, D = normalized_laplacian(W)
    return TransitionGraph(H=H, W=W, D=D, L=L)

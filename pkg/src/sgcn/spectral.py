"""Dense spectral tooling for small graphs: normalized Laplacian, graph
Fourier transform, and polynomial filters. Exists to cross-validate the
sparse operators, so everything here is dense and guarded by size."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .graphs import Graph
from .operators import check_signal, sym_normalized_adjacency

DENSE_SIZE_GUARD = 2000


def normalized_laplacian(g: Graph, size_guard: int | None = None) -> np.ndarray:
    """Dense symmetric normalized Laplacian I - D^-1/2 W D^-1/2.

    Raises:
        ValueError: if g.n exceeds the dense-size guard (DENSE_SIZE_GUARD
        unless overridden).
    """
    if size_guard is None:
        size_guard = DENSE_SIZE_GUARD
    if g.n > size_guard:
        raise ValueError(
            f"graph has {g.n} nodes, above the dense-size guard {size_guard}; "
            "spectral tooling is meant for verification-scale graphs"
        )
    lap = np.eye(g.n) - sym_normalized_adjacency(g).toarray()
    return 0.5 * (lap + lap.T)  # scrub rounding asymmetry


def sparse_normalized_laplacian(g: Graph) -> sp.csr_matrix:
    """CSR normalized Laplacian, no size guard (used by spatial poly filters)."""
    return (sp.identity(g.n, format="csr") - sym_normalized_adjacency(g)).tocsr()


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigendecomposition of the normalized Laplacian.

    eigenvalues are ascending in [0, 2]; eigenvector columns are orthonormal.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def n(self) -> int:
        return int(self.eigenvalues.shape[0])


def decompose(g: Graph, size_guard: int | None = None) -> SpectralDecomposition:
    lap = normalized_laplacian(g, size_guard=size_guard)
    vals, vecs = np.linalg.eigh(lap)  # ascending eigenvalues
    return SpectralDecomposition(eigenvalues=vals, eigenvectors=vecs)


def fourier(dec: SpectralDecomposition, x: np.ndarray) -> np.ndarray:
    """Fourier coefficients <x, q_i> of a signal, i.e. Q^T x."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[0] != dec.n:
        raise ValueError(f"signal length {x.shape[0]} != decomposition size {dec.n}")
    return dec.eigenvectors.T @ x

def inverse_fourier(dec: SpectralDecomposition, coeffs: np.ndarray) -> np.ndarray:
    coeffs = np.asarray(coeffs, dtype=np.float64)
    if coeffs.shape[0] != dec.n:
        raise ValueError(f"coefficient length {coeffs.shape[0]} != decomposition size {dec.n}")
    return dec.eigenvectors @ coeffs


def poly_filter(g: Graph, gammas, x: np.ndarray) -> np.ndarray:
    """Polynomial filter sum_k gammas[k] * L^k x, evaluated spatially.

    Horner-style: only repeated sparse applications of the Laplacian, no
    spectral decomposition required.
    """
    x = check_signal(g, x)
    gammas = np.asarray(gammas, dtype=np.float64)
    if gammas.ndim != 1 or gammas.size == 0:
        raise ValueError("gammas must be a non-empty 1-D coefficient list")
    if not np.all(np.isfinite(gammas)):
        raise ValueError("gammas must be finite")
    lap = sparse_normalized_laplacian(g)
    out = gammas[-1] * x
    for gamma in gammas[-2::-1]:
        out = lap @ out + gamma * x
    return out


def poly_filter_spectral(dec: SpectralDecomposition, gammas, x: np.ndarray) -> np.ndarray:
    """Spectral-domain twin of poly_filter: Q diag(sum_k g_k lambda^k) Q^T x."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[0] != dec.n:
        raise ValueError(f"signal length {x.shape[0]} != decomposition size {dec.n}")
    gammas = np.asarray(gammas, dtype=np.float64)
    response = np.zeros_like(dec.eigenvalues)
    for gamma in gammas[::-1]:
        response = response * dec.eigenvalues + gamma
    coeffs = dec.eigenvectors.T @ x
    scaled = response * coeffs if x.ndim == 1 else response[:, None] * coeffs
    return dec.eigenvectors @ scaled

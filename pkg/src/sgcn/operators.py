"""Sparse linear graph operators: GCN filter, renormalized propagation,
lazy/non-lazy walks, dyadic diffusion wavelets, low-pass, and the residual
convolution. Everything is exposed as apply-to-signal operations; dense
operator matrices are never materialized."""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .graphs import Graph

LAZY_WALK = "lazy_walk"
RENORM_PROP = "renorm_prop"
NONLAZY_WALK = "nonlazy_walk"
RESIDUAL = "residual"


def check_signal(g: Graph, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim not in (1, 2) or x.shape[0] != g.n:
        raise ValueError(f"signal shape {x.shape} does not match graph with n={g.n}")
    return x


class DiffusionPlan:
    """A sparse operator bound to a graph, with a per-signal dyadic cache.

    The cache holds M^(2^j) x vectors for the most recently diffused signal
    batch, so a full wavelet bank up to scale K costs exactly 2^K sparse
    matvec sweeps. Plans are read-only after construction and safe to share;
    the cache is only an accelerator and never changes results.
    """

    def __init__(self, graph: Graph, kind: str, matrix: sp.csr_matrix,
                 alpha: float | None = None):
        self.graph = graph
        self.kind = kind
        self.matrix = matrix
        self.alpha = alpha
        self._matrix_T: sp.csr_matrix | None = None
        self._cache_signal: np.ndarray | None = None
        self._cache_pows: list[np.ndarray] = []

    def apply(self, x: np.ndarray) -> np.ndarray:
        x = check_signal(self.graph, x)
        if self.kind == RESIDUAL:
            return (x + self.alpha * (self.matrix @ x)) / (self.alpha + 1.0)
        return self.matrix @ x

    def apply_transpose(self, x: np.ndarray) -> np.ndarray:
        x = check_signal(self.graph, x)
        if self._matrix_T is None:
            self._matrix_T = self.matrix.T.tocsr()
        if self.kind == RESIDUAL:
            return (x + self.alpha * (self._matrix_T @ x)) / (self.alpha + 1.0)
        return self._matrix_T @ x

    def dyadic_powers(self, x: np.ndarray, j_max: int) -> list[np.ndarray]:
        """M^(2^j) x for j = 0..j_max; incremental, reused while x is live."""
        x = check_signal(self.graph, x)
        if self._cache_signal is not x:
            self._cache_signal = x
            self._cache_pows = []
        pows = self._cache_pows
        while len(pows) <= j_max:
            if not pows:
                pows.append(self.apply(x))
            else:
                cur = pows[-1]
                for _ in range(1 << (len(pows) - 1)):
                    cur = self.apply(cur)
                pows.append(cur)
        return pows[: j_max + 1]


def _col_scaled(g: Graph, scale: np.ndarray) -> sp.csr_matrix:
    # entries w[u,v] * scale[v], keeping g's CSR layout
    vals = g.weights * scale[g.col_ids]
    return sp.csr_matrix((vals, g.col_ids, g.row_offsets), shape=(g.n, g.n))


def sym_normalized_adjacency(g: Graph) -> sp.csr_matrix:
    """D^-1/2 W D^-1/2 in CSR form.

    Entries are w / sqrt(d_u * d_v); the single square root of the product
    keeps entries exact on unweighted regular graphs (sqrt of a perfect
    square does not round)."""
    row_idx = np.repeat(np.arange(g.n), np.diff(g.row_offsets))
    vals = g.weights / np.sqrt(g.degrees[row_idx] * g.degrees[g.col_ids])
    return sp.csr_matrix((vals, g.col_ids, g.row_offsets), shape=(g.n, g.n))


def lazy_walk(g: Graph) -> DiffusionPlan:
    """Lazy random walk plan: 0.5 * (I + W D^-1), column-stochastic."""
    m = 0.5 * (sp.identity(g.n, format="csr") + _col_scaled(g, 1.0 / g.degrees))
    return DiffusionPlan(g, LAZY_WALK, m.tocsr())


def nonlazy_walk(g: Graph) -> DiffusionPlan:
    """Plain random-walk plan W D^-1 (no self-resting mass)."""
    return DiffusionPlan(g, NONLAZY_WALK, _col_scaled(g, 1.0 / g.degrees))


def renorm_propagation(g: Graph) -> DiffusionPlan:
    """Self-loop-renormalized propagation: Dt^-1/2 (I + W) Dt^-1/2."""
    w_tilde = (sp.identity(g.n, format="csr") + g.adjacency()).tocsr()
    d_tilde = np.asarray(w_tilde.sum(axis=1)).ravel()
    inv_sqrt = sp.diags(1.0 / np.sqrt(d_tilde))
    return DiffusionPlan(g, RENORM_PROP, (inv_sqrt @ w_tilde @ inv_sqrt).tocsr())


def residual_plan(g: Graph, alpha: float) -> DiffusionPlan:
    """Residual convolution plan (I + alpha W D^-1) / (alpha + 1).

    alpha = 0 is exactly the identity; alpha -> inf approaches the
    non-lazy walk.
    """
    if alpha < 0:
        raise ValueError(f"alpha must be >= 0, got {alpha}")
    return DiffusionPlan(g, RESIDUAL, _col_scaled(g, 1.0 / g.degrees), alpha=float(alpha))


def gcn_filter(g: Graph, theta: float, x: np.ndarray) -> np.ndarray:
    """Single-parameter convolutional filter theta * (I + D^-1/2 W D^-1/2) x."""
    x = check_signal(g, x)
    return theta * (x + sym_normalized_adjacency(g) @ x)


def apply_power(plan: DiffusionPlan, k: int, x: np.ndarray) -> np.ndarray:
    """Apply the plan operator k times (k = 0 is the identity).

    Dyadic intermediates are cached on the plan, so repeated powers of the
    same signal batch reuse earlier sweeps.
    """
    if k < 0:
        raise ValueError(f"power must be >= 0, got {k}")
    x = check_signal(plan.graph, x)
    if k == 0:
        return x.copy()
    j_max = k.bit_length() - 1
    cur = plan.dyadic_powers(x, j_max)[j_max]
    for _ in range(k - (1 << j_max)):
        cur = plan.apply(cur)
    return cur


def apply_wavelet(plan: DiffusionPlan, k: int, x: np.ndarray) -> np.ndarray:
    """Band-pass response at dyadic scale 2^k.

    Scale 0 is x - Px; scale k >= 1 is P^(2^(k-1)) x - P^(2^k) x, computed
    as a difference of cached diffusions.
    """
    if k < 0:
        raise ValueError(f"wavelet scale must be >= 0, got {k}")
    x = check_signal(plan.graph, x)
    if k == 0:
        return x - plan.dyadic_powers(x, 0)[0]
    pows = plan.dyadic_powers(x, k)
    return pows[k - 1] - pows[k]


def apply_lowpass(plan: DiffusionPlan, K: int, x: np.ndarray) -> np.ndarray:
    """Pure low-pass response P^(2^K) x."""
    if K < 0:
        raise ValueError(f"low-pass scale must be >= 0, got {K}")
    x = check_signal(plan.graph, x)
    return plan.dyadic_powers(x, K)[K]


def wavelet_filter_bank(plan: DiffusionPlan, K: int, x: np.ndarray):
    """All band-pass responses for scales 0..K plus the low-pass remainder.

    Returns (list of K+1 wavelet responses, low-pass response). The whole
    bank telescopes back to x, and costs 2^K matvec sweeps total.
    """
    x = check_signal(plan.graph, x)
    pows = plan.dyadic_powers(x, K)
    bands = [x - pows[0]]
    bands.extend(pows[k - 1] - pows[k] for k in range(1, K + 1))
    return bands, pows[K]


def residual_conv(g: Graph, alpha: float, x: np.ndarray) -> np.ndarray:
    """Apply the residual convolution (I + alpha W D^-1) x / (alpha + 1)."""
    return residual_plan(g, alpha).apply(x)

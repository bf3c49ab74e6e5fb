"""Node-level scattering cascades and whole-graph scattering moments."""

from __future__ import annotations

import numpy as np

from .operators import LAZY_WALK, DiffusionPlan, apply_wavelet, check_signal

MAX_SCALE_DEFAULT = 4


def normalize_path(path, max_scale: int = MAX_SCALE_DEFAULT) -> tuple[int, ...]:
    """Validate a scattering path: a non-empty tuple of scale indices.

    The first entry is the innermost wavelet (applied first). Scales above
    max_scale are rejected; raise the cap explicitly for deeper diffusions.
    """
    scales = tuple(int(k) for k in path)
    if len(scales) == 0:
        raise ValueError("scattering path must contain at least one scale")
    if any(k < 0 for k in scales):
        raise ValueError(f"scattering scales must be >= 0, got {scales}")
    if any(k > max_scale for k in scales):
        raise ValueError(f"path {scales} exceeds max supported scale {max_scale}")
    return scales


def parse_path(text: str, max_scale: int = MAX_SCALE_DEFAULT) -> tuple[int, ...]:
    """Parse a comma-separated path, innermost scale first (e.g. "3,2")."""
    try:
        parts = [int(p) for p in text.split(",")]
    except ValueError as exc:
        raise ValueError(f"cannot parse scattering path {text!r}") from exc
    return normalize_path(parts, max_scale=max_scale)


def path_label(path) -> str:
    """Stable display name for a path, innermost scale first."""
    return "psi" + ",".join(str(k) for k in path)


def scatter_node(plan: DiffusionPlan, path, x: np.ndarray,
                 max_scale: int = MAX_SCALE_DEFAULT) -> np.ndarray:
    """Scattering cascade over the given path, interior absolute values only.

    For path (k_1, ..., k_m) the innermost wavelet k_1 is applied first; an
    element-wise absolute value separates consecutive wavelets, and the
    outermost response is returned signed.
    """
    if plan.kind != LAZY_WALK:
        raise ValueError("scattering requires a lazy-walk diffusion plan")
    scales = normalize_path(path, max_scale=max_scale)
    x = check_signal(plan.graph, x)
    out = apply_wavelet(plan, scales[0], x)
    for k in scales[1:]:
        out = apply_wavelet(plan, k, np.abs(out))
    return out


def scatter_graph_moments(plan: DiffusionPlan, path, q: int, x: np.ndarray,
                          max_scale: int = MAX_SCALE_DEFAULT) -> float:
    """q-th order scattering moment: sum_i |cascade(x)[v_i]|^q.

    Aggregates a single-column signal over all nodes, which makes the result
    invariant to node relabeling.
    """
    if int(q) != q or q < 1:
        raise ValueError(f"moment order must be an integer >= 1, got {q}")
    x = check_signal(plan.graph, x)
    if x.ndim != 1:
        if x.ndim == 2 and x.shape[1] == 1:
            x = x[:, 0]
        else:
            raise ValueError("graph moments are defined for single-column signals")
    u = scatter_node(plan, path, x, max_scale=max_scale)
    return float(np.sum(np.abs(u) ** int(q)))

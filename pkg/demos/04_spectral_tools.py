"""Dense spectral cross-checks: Laplacian spectrum, graph Fourier transform,
and the two routes to polynomial filtering (spatial Horner vs spectral)."""

import numpy as np

from sgcn import (
    decompose,
    fourier,
    inverse_fourier,
    make_cyclic,
    poly_filter,
    poly_filter_spectral,
)

g = make_cyclic(6)
dec = decompose(g)
print("normalized-Laplacian eigenvalues of C_6:", np.round(dec.eigenvalues, 6))

rng = np.random.default_rng(1)
x = rng.normal(size=6)
coeffs = fourier(dec, x)
print("\nFourier round-trip error:",
      f"{np.abs(inverse_fourier(dec, coeffs) - x).max():.2e}")
print("Parseval check |x_hat| - |x|:",
      f"{abs(np.linalg.norm(coeffs) - np.linalg.norm(x)):.2e}")

gammas = [0.5, -1.0, 0.25, 0.1]
spatial = poly_filter(g, gammas, x)
spectral = poly_filter_spectral(dec, gammas, x)
print("\npolynomial filter, spatial vs spectral route:",
      f"{np.abs(spatial - spectral).max():.2e}")

# the single-parameter smoothing filter is the degree-1 polynomial [2t, -t]
from sgcn import gcn_filter

theta = 0.3
assert np.abs(poly_filter(g, [2 * theta, -theta], x)
              - gcn_filter(g, theta, x)).max() < 1e-12
print("degree-1 polynomial [2t, -t] reproduces the smoothing filter")

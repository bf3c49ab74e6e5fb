"""Why band-pass channels matter: alternating signals on cycles.

A 2-periodic signal on an even cycle is flattened to a constant by the
single-parameter smoothing filter, no matter how often it is applied. The
scale-0 band-pass response keeps the alternation alive. The same story holds
for 2-colorings of regular bipartite graphs.
"""

import numpy as np

from sgcn import gcn_filter, lazy_walk, make_bipartite_regular, make_cyclic
from sgcn.operators import apply_wavelet

g = make_cyclic(8)
a, b = 1.0, 3.0
x = np.where(np.arange(8) % 2 == 0, a, b)
print("cycle C_8, signal:", x)

smoothed = gcn_filter(g, theta=0.7, x=x)
print("smoothing filter output:", np.round(smoothed, 6), "<- constant")

walk = lazy_walk(g)
band = apply_wavelet(walk, 0, x)
print("scale-0 band-pass output:", np.round(band, 6), "<- still 2-periodic")

print("\ncascading 5 more times:")
deep_smooth, deep_band = smoothed, band
for _ in range(5):
    deep_smooth = gcn_filter(g, 0.7, deep_smooth)
    deep_band = apply_wavelet(walk, 0, deep_band)
print("smoothing cascade:", np.round(deep_smooth, 6))
print("band-pass cascade:", np.round(deep_band, 6))

print("\nregular bipartite version (K_{3,3}, parts colored 0 / 4):")
kb = make_bipartite_regular(3, 3)
x2 = np.array([0.0, 0, 0, 4, 4, 4])
print("smoothing:", np.round(gcn_filter(kb, 1.0, x2), 6))
print("band-pass:", np.round(apply_wavelet(lazy_walk(kb), 0, x2), 6))

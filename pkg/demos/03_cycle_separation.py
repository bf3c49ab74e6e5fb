"""Geometry captured from a constant signal.

Two cycles of different lengths joined by one bottleneck edge. Feeding in
the all-ones signal, the smoothing filter responds with only three values
determined by local neighborhood type, and every cycle contains all three:
the cycles are indistinguishable. The scale-3 band-pass response assigns the
cycles different value profiles and separates them.
"""

import numpy as np

from sgcn import gcn_filter, lazy_walk, make_chained_cycles, verify_fig3_table
from sgcn.lemmalab import classify_nodes
from sgcn.operators import apply_wavelet

g = make_chained_cycles([6, 8])
ones = np.ones(g.n)

smooth = gcn_filter(g, 1.0, ones)
classes = classify_nodes(g)
names = {0: "hub", 1: "pass/pass", 2: "pass@hub"}
print("node | cycle | type      | smoothing | band-pass (x1e-3)")
band = apply_wavelet(lazy_walk(g), 3, ones)
for u in range(g.n):
    cyc = 1 if u < 6 else 2
    print(f"  v{u + 1:<3}|   {cyc}   | {names[classes[u]]:<9} |"
          f" {smooth[u]:9.5f} | {band[u] * 1e3:8.1f}")

print("\nsmoothing values in cycle 1:", sorted({round(v, 9) for v in smooth[:6]}))
print("smoothing values in cycle 2:", sorted({round(v, 9) for v in smooth[6:]}))
print("-> identical three-value sets; the cycles cannot be told apart")

print("\nband-pass multiset, cycle 1:", sorted(np.round(band[:6] * 1e3, 1)))
print("band-pass multiset, cycle 2:", sorted(np.round(band[6:] * 1e3, 1)))
print("-> different profiles; the cycles separate")

r = verify_fig3_table()
print(f"\npublished-table check: passed={r.passed}, "
      f"max deviation {r.max_deviation:.2e}")

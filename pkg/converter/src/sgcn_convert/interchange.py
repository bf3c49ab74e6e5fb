"""Writers for the plain interchange format consumed by the sgcn toolkit.

Deliberately self-contained: the converter talks to the toolkit only through
these files.

  graph.txt      "n m" header, then m lines "u v w" (u < v, sorted)
  features.txt   "n d" header, then n rows of decimals
  features.bin   magic "SGCNF1", u64 n, u64 d (little-endian), row-major f64
  labels.txt     one integer per node, -1 for unlabeled
  split_*.txt    one node index per line, ascending
"""

from __future__ import annotations

import hashlib
import struct
from pathlib import Path

import numpy as np

FEATURE_MAGIC = b"SGCNF1"

# feature matrices with at least this many cells go to the binary format
BINARY_FEATURE_CELLS = 2_000_000


def write_graph(path, n: int, edges) -> int:
    """Write undirected edges (u, v, w); returns the edge count."""
    rows = sorted((int(u), int(v), float(w)) for u, v, w in edges)
    with open(path, "w") as fh:
        fh.write(f"{n} {len(rows)}\n")
        for u, v, w in rows:
            fh.write(f"{u} {v} {w!r}\n")
    return len(rows)


def write_features(directory, features: np.ndarray) -> Path:
    """Write features.txt or features.bin depending on matrix size."""
    directory = Path(directory)
    n, d = features.shape
    if n * d >= BINARY_FEATURE_CELLS:
        path = directory / "features.bin"
        with open(path, "wb") as fh:
            fh.write(FEATURE_MAGIC)
            fh.write(struct.pack("<QQ", n, d))
            fh.write(np.ascontiguousarray(features, dtype="<f8").tobytes())
    else:
        path = directory / "features.txt"
        with open(path, "w") as fh:
            fh.write(f"{n} {d}\n")
            for row in features:
                fh.write(" ".join(repr(float(v)) for v in row) + "\n")
    return path


def write_labels(path, labels) -> None:
    with open(path, "w") as fh:
        fh.write("\n".join(str(int(v)) for v in labels) + "\n")


def write_split(path, indices) -> None:
    with open(path, "w") as fh:
        fh.write("".join(f"{int(v)}\n" for v in sorted(int(i) for i in indices)))


def sha256_of(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()

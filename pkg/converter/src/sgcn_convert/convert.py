"""Conversion driver: archive -> interchange files + manifest.

Counts for the four supported datasets are pinned; a converted dataset whose
node/edge/feature counts disagree still gets written (so CI can inspect the
outputs), but the manifest records both sides and the conversion fails.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .interchange import sha256_of, write_features, write_graph, write_labels, write_split
from .planetoid import ArchiveError, RawDataset, read_archive

EXPECTED_COUNTS = {
    #          nodes   edges  features
    "cora":     (2708,  5429, 1433),
    "citeseer": (3327,  4732, 3703),
    "pubmed":  (19717, 44338,  500),
    "dblp":    (17716, 52867, 1639),
}

SEEDED_SPLIT_DATASETS = ("dblp",)   # no standard public split; drawn 5:1:1
SPLIT_RATIO = (5, 1, 1)


class CountMismatchError(RuntimeError):
    """Converted counts disagree with the pinned dataset characteristics."""

    def __init__(self, diff: str, manifest: "ConversionManifest"):
        super().__init__(diff)
        self.manifest = manifest


@dataclass
class ConversionManifest:
    dataset: str
    seed: int
    counts: dict            # nodes / edges / features / classes
    expected: dict          # pinned nodes / edges / features
    matches_expected: bool
    split_sizes: dict
    dropped: dict           # self_loops / duplicate_edges from the raw source
    checksums: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "schema": "sgcn/1",
            "kind": "conversion-manifest",
            "dataset": self.dataset,
            "seed": self.seed,
            "counts": self.counts,
            "expected": self.expected,
            "matches_expected": self.matches_expected,
            "split_sizes": self.split_sizes,
            "dropped": self.dropped,
            "checksums": self.checksums,
        }


def undirected_edges(adjacency: dict) -> tuple[list, int, int]:
    """Collapse an adjacency-list dict to unique undirected edges.

    Returns (edges, dropped_self_loops, dropped_duplicates); duplicates count
    every repeated mention beyond the first of an undirected pair.
    """
    seen = set()
    self_loops = 0
    duplicates = 0
    edges = []
    for u in sorted(adjacency):
        for v in adjacency[u]:
            u_i, v_i = int(u), int(v)
            if u_i == v_i:
                self_loops += 1
                continue
            key = (min(u_i, v_i), max(u_i, v_i))
            if key in seen:
                duplicates += 1
                continue
            seen.add(key)
            edges.append((key[0], key[1], 1.0))
    # every undirected edge is normally mentioned twice (u->v and v->u)
    duplicates -= len(edges)
    return edges, self_loops, max(duplicates, 0)


def seeded_split(labels: np.ndarray, seed: int):
    """5:1:1 train/val/test split over the labeled nodes, seed-deterministic."""
    labeled = np.nonzero(labels >= 0)[0]
    rng = np.random.Generator(np.random.Philox(seed))
    order = labeled[rng.permutation(labeled.size)]
    total = sum(SPLIT_RATIO)
    n_val = labeled.size * SPLIT_RATIO[1] // total
    n_test = labeled.size * SPLIT_RATIO[2] // total
    n_train = labeled.size - n_val - n_test
    return (np.sort(order[:n_train]),
            np.sort(order[n_train:n_train + n_val]),
            np.sort(order[n_train + n_val:]))


def convert(name: str, src_dir, dst_dir, seed: int = 0) -> ConversionManifest:
    """Convert one archive; writes interchange files plus manifest.json.

    Raises:
        ArchiveError: missing or corrupt source files.
        CountMismatchError: outputs written, but counts disagree with the
            pinned dataset characteristics (manifest records both).
    """
    if name not in EXPECTED_COUNTS:
        raise ArchiveError(
            f"unknown dataset {name!r}; supported: {sorted(EXPECTED_COUNTS)}")
    raw = read_archive(src_dir, name)
    dst = Path(dst_dir)
    dst.mkdir(parents=True, exist_ok=True)

    edges, self_loops, duplicates = undirected_edges(raw.adjacency)
    if name in SEEDED_SPLIT_DATASETS:
        train_ids, val_ids, test_ids = seeded_split(raw.labels, seed)
    else:
        train_ids, val_ids, test_ids = raw.train_ids, raw.val_ids, raw.test_ids

    n_edges = write_graph(dst / "graph.txt", raw.n, edges)
    feature_path = write_features(dst, raw.features)
    write_labels(dst / "labels.txt", raw.labels)
    write_split(dst / "split_train.txt", train_ids)
    write_split(dst / "split_val.txt", val_ids)
    write_split(dst / "split_test.txt", test_ids)

    counts = {
        "nodes": raw.n,
        "edges": n_edges,
        "features": int(raw.features.shape[1]),
        "classes": int(raw.labels.max()) + 1,
    }
    exp_nodes, exp_edges, exp_features = EXPECTED_COUNTS[name]
    expected = {"nodes": exp_nodes, "edges": exp_edges, "features": exp_features}
    matches = all(counts[k] == expected[k] for k in expected)

    manifest = ConversionManifest(
        dataset=name,
        seed=seed,
        counts=counts,
        expected=expected,
        matches_expected=matches,
        split_sizes={"train": int(train_ids.size), "val": int(val_ids.size),
                     "test": int(test_ids.size)},
        dropped={"self_loops": self_loops, "duplicate_edges": duplicates},
    )
    files = ["graph.txt", feature_path.name, "labels.txt",
             "split_train.txt", "split_val.txt", "split_test.txt"]
    manifest.checksums = {f: sha256_of(dst / f) for f in files}
    (dst / "manifest.json").write_text(
        json.dumps(manifest.to_dict(), indent=2, sort_keys=True) + "\n")

    if not matches:
        diff = "; ".join(
            f"{k}: expected {expected[k]}, got {counts[k]}"
            for k in expected if counts[k] != expected[k])
        raise CountMismatchError(f"{name} counts off the pinned table: {diff}",
                                 manifest)
    return manifest

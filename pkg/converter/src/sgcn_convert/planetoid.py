"""Reader for the pickled citation-network archive layout.

An archive directory holds, per dataset <name>:

  ind.<name>.x / .tx / .allx   scipy sparse feature blocks (train / test / rest)
  ind.<name>.y / .ty / .ally   one-hot label blocks matching x / tx / allx
  ind.<name>.graph             dict: node id -> neighbor id list
  ind.<name>.test.index        text file of test node ids (shuffled order)

Feature and label rows are stored as [allx | tx] with the tx block permuted
by test.index; this module undoes the permutation and patches the gaps some
releases have in the test range (rows missing from tx get zero features and
an unlabeled marker).
"""

from __future__ import annotations

import pickle
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.sparse as sp


class ArchiveError(ValueError):
    """Missing or structurally corrupt archive."""


@dataclass
class RawDataset:
    features: np.ndarray          # (n, d) dense
    labels: np.ndarray            # (n,), -1 where the archive has no label
    adjacency: dict               # node -> neighbor list
    train_ids: np.ndarray
    val_ids: np.ndarray
    test_ids: np.ndarray

    @property
    def n(self) -> int:
        return self.features.shape[0]


def _load_pickle(path: Path):
    if not path.exists():
        raise ArchiveError(f"missing archive file {path}")
    with open(path, "rb") as fh:
        try:
            return pickle.load(fh, encoding="latin1")
        except Exception as exc:  # noqa: BLE001 - report any unpickling issue
            raise ArchiveError(f"cannot unpickle {path}: {exc}") from exc


def _as_dense(block, what: str) -> np.ndarray:
    if sp.issparse(block):
        return np.asarray(block.todense(), dtype=np.float64)
    arr = np.asarray(block, dtype=np.float64)
    if arr.ndim != 2:
        raise ArchiveError(f"{what}: expected a 2-d block, got shape {arr.shape}")
    return arr


def _onehot_to_labels(onehot: np.ndarray, what: str) -> np.ndarray:
    """All-zero rows mean 'no label'; multi-hot rows are corrupt."""
    hits = onehot != 0
    per_row = hits.sum(axis=1)
    if np.any(per_row > 1):
        bad = int(np.argmax(per_row > 1))
        raise ArchiveError(f"{what}: row {bad} has {int(per_row[bad])} label bits set")
    labels = np.where(per_row == 1, np.argmax(hits, axis=1), -1)
    return labels.astype(np.int64)


def read_archive(src_dir, name: str, val_size: int = 500) -> RawDataset:
    src = Path(src_dir)
    x = _as_dense(_load_pickle(src / f"ind.{name}.x"), "x")
    tx = _as_dense(_load_pickle(src / f"ind.{name}.tx"), "tx")
    allx = _as_dense(_load_pickle(src / f"ind.{name}.allx"), "allx")
    y = np.asarray(_load_pickle(src / f"ind.{name}.y"))
    ty = np.asarray(_load_pickle(src / f"ind.{name}.ty"))
    ally = np.asarray(_load_pickle(src / f"ind.{name}.ally"))
    graph = _load_pickle(src / f"ind.{name}.graph")
    if not isinstance(graph, dict):
        raise ArchiveError(f"ind.{name}.graph: expected a dict of adjacency lists")

    index_path = src / f"ind.{name}.test.index"
    if not index_path.exists():
        raise ArchiveError(f"missing archive file {index_path}")
    test_idx = np.array([int(line) for line in index_path.read_text().split()],
                        dtype=np.int64)
    if test_idx.size == 0:
        raise ArchiveError(f"{index_path}: empty test index")
    test_sorted = np.sort(test_idx)

    if x.shape[0] != y.shape[0] or tx.shape[0] != ty.shape[0] \
            or allx.shape[0] != ally.shape[0]:
        raise ArchiveError(f"{name}: feature/label block row counts disagree")
    if tx.shape[0] != test_idx.size:
        raise ArchiveError(
            f"{name}: tx has {tx.shape[0]} rows but test.index lists {test_idx.size}")

    # patch releases whose test range has holes: missing rows become
    # zero-feature, unlabeled nodes (they stay out of every split)
    full_range = np.arange(test_sorted[0], test_sorted[-1] + 1)
    if full_range.size != test_idx.size:
        tx_full = np.zeros((full_range.size, tx.shape[1]))
        ty_full = np.zeros((full_range.size, ty.shape[1]))
        tx_full[test_sorted - test_sorted[0]] = tx[np.argsort(test_idx)]
        ty_full[test_sorted - test_sorted[0]] = ty[np.argsort(test_idx)]
        # already in sorted-row order, so the permutation below is identity
        features = np.vstack([allx, tx_full])
        label_bits = np.vstack([ally, ty_full])
    else:
        features = np.vstack([allx, tx])
        label_bits = np.vstack([ally, ty])
        order = np.empty_like(test_idx)
        order[test_idx - test_sorted[0]] = np.arange(test_idx.size)
        block = slice(allx.shape[0], allx.shape[0] + test_idx.size)
        features[block] = features[block][order]
        label_bits[block] = label_bits[block][order]

    n = features.shape[0]
    n_graph = (max(graph.keys()) + 1) if graph else 0
    if n_graph > n:
        raise ArchiveError(
            f"{name}: graph mentions node {n_graph - 1} but only {n} feature rows exist")
    if test_sorted[0] != allx.shape[0]:
        raise ArchiveError(
            f"{name}: test block starts at {test_sorted[0]}, expected {allx.shape[0]}")

    labels = _onehot_to_labels(label_bits, name)
    train_ids = np.arange(y.shape[0])
    val_ids = np.arange(y.shape[0], min(y.shape[0] + val_size, allx.shape[0]))
    return RawDataset(features=features, labels=labels, adjacency=graph,
                      train_ids=train_ids, val_ids=val_ids, test_ids=test_sorted)

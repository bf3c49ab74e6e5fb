"""Dataset ingestion and persistence in a plain, auditable interchange
format, plus run-configuration parsing and the shipped hyperparameter
presets.

Formats (all text unless noted):
  graph.txt        line 1 "n m", then m lines "u v w" (0-based, undirected,
                   each edge once, w optional with default 1)
  features.txt     line 1 "n d", then n rows of d decimals
  features.bin     magic "SGCNF1", two little-endian u64 dims, then
                   row-major little-endian f64 values (for large datasets)
  labels.txt       n lines, integer class id or -1 for unlabeled
  split_*.txt      one node index per line (train/val/test)
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .graphs import Graph, build_graph
from .network import Channel, ModelSpec, TrainConfig, channel_from_dict, channel_to_dict

CONFIG_SCHEMA = "sgcn/1"
FEATURE_MAGIC = b"SGCNF1"
SPLIT_NAMES = ("train", "val", "test")


class FormatError(ValueError):
    """Malformed interchange file; message carries file and line."""


def _fail(path, line_no, message) -> None:
    where = f"{path}:{line_no}" if line_no else str(path)
    raise FormatError(f"{where}: {message}")


# ---------------------------------------------------------------------------
# Dataset container
# ---------------------------------------------------------------------------

@dataclass
class Dataset:
    graph: Graph
    features: np.ndarray               # (n, d), rows sum to 1 where positive
    labels: np.ndarray                 # (n,), -1 marks unlabeled
    masks: dict[str, np.ndarray]       # sorted unique node indices per split

    @property
    def n_classes(self) -> int:
        return int(self.labels.max()) + 1

    def validate(self) -> None:
        n = self.graph.n
        if self.features.shape[0] != n:
            raise ValueError(f"feature rows {self.features.shape[0]} != graph nodes {n}")
        if self.labels.shape != (n,):
            raise ValueError("labels must be one integer per node")
        if not np.all(np.isfinite(self.features)):
            raise ValueError("features contain non-finite entries")
        names = list(self.masks)
        for i, a in enumerate(names):
            idx = self.masks[a]
            if idx.size and (idx.min() < 0 or idx.max() >= n):
                raise ValueError(f"split {a!r} contains out-of-range node index")
            if np.unique(idx).size != idx.size:
                raise ValueError(f"split {a!r} contains duplicate node indices")
            if np.any(self.labels[idx] < 0):
                bad = int(idx[np.argmax(self.labels[idx] < 0)])
                raise ValueError(f"split {a!r} includes unlabeled node {bad}")
            for b in names[i + 1:]:
                common = np.intersect1d(idx, self.masks[b])
                if common.size:
                    raise ValueError(
                        f"splits {a!r} and {b!r} overlap on node {int(common[0])}")


def row_normalize(features: np.ndarray) -> np.ndarray:
    """Divide positive-sum rows by their sum.

    Rows already summing to 1 within accumulated-rounding distance are left
    untouched, which makes the operation exactly idempotent: re-loading
    saved (already normalized) features is a bitwise no-op."""
    out = np.array(features, dtype=np.float64, copy=True)
    if out.size == 0:
        return out
    sums = out.sum(axis=1)
    tol = 16 * np.finfo(np.float64).eps * max(1, out.shape[1])
    todo = (sums > 0) & (np.abs(sums - 1.0) > tol)
    out[todo] /= sums[todo, None]
    return out


# ---------------------------------------------------------------------------
# File readers / writers
# ---------------------------------------------------------------------------

def _read_lines(path: Path) -> list[str]:
    try:
        text = path.read_text()
    except FileNotFoundError:
        raise FormatError(f"{path}: file not found") from None
    lines = text.split("\n")
    while lines and lines[-1] == "":
        lines.pop()
    return lines


def read_graph_txt(path) -> Graph:
    path = Path(path)
    lines = _read_lines(path)
    if not lines:
        _fail(path, 1, "empty graph file")
    head = lines[0].split()
    if len(head) != 2:
        _fail(path, 1, f"expected header 'n m', got {lines[0]!r}")
    try:
        n, m = int(head[0]), int(head[1])
    except ValueError:
        _fail(path, 1, f"cannot parse header {lines[0]!r}")
    if len(lines) - 1 != m:
        _fail(path, len(lines), f"header promises {m} edges, file has {len(lines) - 1}")
    edges = []
    for i, line in enumerate(lines[1:], start=2):
        parts = line.split()
        if len(parts) not in (2, 3):
            _fail(path, i, f"expected 'u v [w]', got {line!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
            w = float(parts[2]) if len(parts) == 3 else 1.0
        except ValueError:
            _fail(path, i, f"cannot parse edge {line!r}")
        edges.append((u, v, w))
    try:
        return build_graph(n, edges)
    except ValueError as exc:
        _fail(path, None, str(exc))


def write_graph_txt(path, g: Graph) -> None:
    """Canonical form: u < v, sorted, explicit weights; self-loops omitted
    (the loader re-adds unit self-loops on isolated nodes)."""
    rows = []
    row_idx = np.repeat(np.arange(g.n), np.diff(g.row_offsets))
    for u, v, w in zip(row_idx, g.col_ids, g.weights):
        if u < v:
            rows.append((int(u), int(v), float(w)))
    rows.sort()
    out = [f"{g.n} {len(rows)}"]
    out.extend(f"{u} {v} {w!r}" for u, v, w in rows)
    Path(path).write_text("\n".join(out) + "\n")


def read_features_txt(path) -> np.ndarray:
    path = Path(path)
    lines = _read_lines(path)
    if not lines:
        _fail(path, 1, "empty feature file")
    head = lines[0].split()
    if len(head) != 2:
        _fail(path, 1, f"expected header 'n d', got {lines[0]!r}")
    try:
        n, d = int(head[0]), int(head[1])
    except ValueError:
        _fail(path, 1, f"cannot parse header {lines[0]!r}")
    if len(lines) - 1 != n:
        _fail(path, len(lines), f"header promises {n} rows, file has {len(lines) - 1}")
    out = np.empty((n, d))
    for i, line in enumerate(lines[1:]):
        parts = line.split()
        if len(parts) != d:
            _fail(path, i + 2, f"expected {d} values, got {len(parts)}")
        try:
            out[i] = [float(p) for p in parts]
        except ValueError:
            _fail(path, i + 2, "cannot parse feature value")
    if not np.all(np.isfinite(out)):
        bad = int(np.nonzero(~np.isfinite(out).all(axis=1))[0][0])
        _fail(path, bad + 2, "non-finite feature value")
    return out


def write_features_txt(path, features: np.ndarray) -> None:
    n, d = features.shape
    with open(path, "w") as fh:
        fh.write(f"{n} {d}\n")
        for row in features:
            fh.write(" ".join(repr(float(v)) for v in row) + "\n")


def read_features_bin(path) -> np.ndarray:
    path = Path(path)
    blob = path.read_bytes()
    header = len(FEATURE_MAGIC) + 16
    if len(blob) < header or blob[: len(FEATURE_MAGIC)] != FEATURE_MAGIC:
        _fail(path, None, "not a binary feature file (bad magic)")
    n, d = struct.unpack("<QQ", blob[len(FEATURE_MAGIC):header])
    expected = header + n * d * 8
    if len(blob) != expected:
        _fail(path, None, f"size {len(blob)} != expected {expected} for {n}x{d}")
    out = np.frombuffer(blob, dtype="<f8", offset=header).reshape(n, d)
    out = np.ascontiguousarray(out)
    if not np.all(np.isfinite(out)):
        _fail(path, None, "non-finite feature value")
    return out


def write_features_bin(path, features: np.ndarray) -> None:
    n, d = features.shape
    with open(path, "wb") as fh:
        fh.write(FEATURE_MAGIC)
        fh.write(struct.pack("<QQ", n, d))
        fh.write(np.ascontiguousarray(features, dtype="<f8").tobytes())


def read_labels_txt(path, n: int) -> np.ndarray:
    path = Path(path)
    lines = _read_lines(path)
    if len(lines) != n:
        _fail(path, len(lines), f"expected {n} label lines, got {len(lines)}")
    out = np.empty(n, dtype=np.int64)
    for i, line in enumerate(lines):
        try:
            out[i] = int(line.strip())
        except ValueError:
            _fail(path, i + 1, f"cannot parse label {line!r}")
        if out[i] < -1:
            _fail(path, i + 1, f"label must be >= -1, got {out[i]}")
    return out


def read_split_txt(path, n: int) -> np.ndarray:
    path = Path(path)
    lines = _read_lines(path)
    out = np.empty(len(lines), dtype=np.int64)
    for i, line in enumerate(lines):
        try:
            out[i] = int(line.strip())
        except ValueError:
            _fail(path, i + 1, f"cannot parse node index {line!r}")
        if not 0 <= out[i] < n:
            _fail(path, i + 1, f"node index {out[i]} out of range [0, {n})")
    uniq, counts = np.unique(out, return_counts=True)
    if np.any(counts > 1):
        dup = int(uniq[np.argmax(counts > 1)])
        _fail(path, None, f"duplicate node index {dup} in split")
    return np.sort(out)


def load_dataset(directory) -> Dataset:
    """Load and validate a dataset directory; see the module docstring for
    the file formats. Isolated nodes get unit self-loops; feature rows are
    normalized to unit sum."""
    directory = Path(directory)
    graph = read_graph_txt(directory / "graph.txt")
    if (directory / "features.txt").exists():
        features = read_features_txt(directory / "features.txt")
    elif (directory / "features.bin").exists():
        features = read_features_bin(directory / "features.bin")
    else:
        raise FormatError(f"{directory}: neither features.txt nor features.bin present")
    if features.shape[0] != graph.n:
        raise FormatError(
            f"{directory}: feature rows {features.shape[0]} != graph nodes {graph.n}")
    labels = read_labels_txt(directory / "labels.txt", graph.n)
    masks = {
        name: read_split_txt(directory / f"split_{name}.txt", graph.n)
        for name in SPLIT_NAMES
    }
    ds = Dataset(graph=graph, features=row_normalize(features), labels=labels,
                 masks=masks)
    ds.validate()
    return ds


def save_dataset(dataset: Dataset, directory, binary_features: bool = False) -> None:
    """Write a dataset in canonical ordering (byte-stable for equal input)."""
    dataset.validate()
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    write_graph_txt(directory / "graph.txt", dataset.graph)
    if binary_features:
        write_features_bin(directory / "features.bin", dataset.features)
    else:
        write_features_txt(directory / "features.txt", dataset.features)
    with open(directory / "labels.txt", "w") as fh:
        fh.write("\n".join(str(int(v)) for v in dataset.labels) + "\n")
    for name in SPLIT_NAMES:
        idx = np.sort(dataset.masks[name])
        with open(directory / f"split_{name}.txt", "w") as fh:
            fh.write("".join(f"{int(v)}\n" for v in idx))


# ---------------------------------------------------------------------------
# Run configuration
# ---------------------------------------------------------------------------

_TRAINER_KEYS = {"lr", "beta1", "beta2", "eps", "weight_decay", "epochs",
                 "patience", "seed"}


@dataclass
class RunConfig:
    layers: list[list[Channel]]
    q: list[int]
    alpha: float
    trainer: TrainConfig = field(default_factory=TrainConfig)
    data_dir: str | None = None

    def model_spec(self, input_dim: int, n_classes: int) -> ModelSpec:
        return ModelSpec(
            layers=tuple(tuple(chs) for chs in self.layers),
            q=tuple(self.q),
            alpha=self.alpha,
            input_dim=input_dim,
            n_classes=n_classes,
        )

    def to_dict(self) -> dict:
        doc = {
            "schema": CONFIG_SCHEMA,
            "kind": "run-config",
            "model": {
                "layers": [[channel_to_dict(c) for c in chs] for chs in self.layers],
                "q": list(self.q),
                "alpha": self.alpha,
            },
            "trainer": {
                "lr": self.trainer.lr,
                "beta1": self.trainer.beta1,
                "beta2": self.trainer.beta2,
                "eps": self.trainer.eps,
                "weight_decay": self.trainer.weight_decay,
                "epochs": self.trainer.epochs,
                "patience": self.trainer.patience,
                "seed": self.trainer.seed,
            },
        }
        if self.data_dir is not None:
            doc["data_dir"] = self.data_dir
        return doc


def _reject_unknown(d: dict, allowed, where: str) -> None:
    unknown = set(d) - set(allowed)
    if unknown:
        raise ValueError(f"unknown config key(s) in {where}: {sorted(unknown)}")


def config_from_dict(doc: dict) -> RunConfig:
    _reject_unknown(doc, {"schema", "kind", "model", "trainer", "data_dir"}, "config")
    if doc.get("schema", CONFIG_SCHEMA) != CONFIG_SCHEMA:
        raise ValueError(f"unsupported config schema {doc.get('schema')!r}")
    if "model" not in doc:
        raise ValueError("config is missing the 'model' section")
    model = doc["model"]
    _reject_unknown(model, {"layers", "q", "alpha"}, "model")
    for key in ("layers", "q", "alpha"):
        if key not in model:
            raise ValueError(f"model section is missing {key!r}")
    layers = [[_channel_checked(c) for c in chs] for chs in model["layers"]]
    if any(int(v) != v for v in model["q"]):
        raise ValueError(f"nonlinearity exponents must be integers, got {model['q']}")
    q = [int(v) for v in model["q"]]
    alpha = float(model["alpha"])

    trainer_doc = doc.get("trainer", {})
    _reject_unknown(trainer_doc, _TRAINER_KEYS, "trainer")
    trainer = TrainConfig(**{k: v for k, v in trainer_doc.items()})

    cfg = RunConfig(layers=layers, q=q, alpha=alpha, trainer=trainer,
                    data_dir=doc.get("data_dir"))
    # surface spec-level validation problems (widths, exponents, ...) now
    cfg.model_spec(input_dim=1, n_classes=2)
    return cfg


def _channel_checked(c: dict) -> Channel:
    allowed = {"kind", "power", "width"} if c.get("kind") == "gcn" else {"kind", "path", "width"}
    _reject_unknown(c, allowed, f"channel {c.get('kind', '?')}")
    return channel_from_dict(c)


def load_config(path) -> RunConfig:
    with open(path) as fh:
        doc = json.load(fh)
    return config_from_dict(doc)


def save_config(path, config: RunConfig) -> None:
    with open(path, "w") as fh:
        json.dump(config.to_dict(), fh, indent=2)
        fh.write("\n")


PRESET_NAMES = ("cora", "citeseer", "pubmed", "dblp", "toy")


def load_preset(name: str) -> RunConfig:
    """Shipped hyperparameter presets (channel layout, q, alpha) per dataset."""
    if name not in PRESET_NAMES:
        raise ValueError(f"unknown preset {name!r}; have {PRESET_NAMES}")
    text = resources.files("sgcn.presets").joinpath(f"{name}.json").read_text()
    return config_from_dict(json.loads(text))

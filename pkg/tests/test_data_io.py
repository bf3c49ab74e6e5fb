import json

import numpy as np
import pytest

import sgcn
from sgcn import data_io
from sgcn.data_io import (
    Dataset,
    FormatError,
    load_config,
    load_dataset,
    load_preset,
    row_normalize,
    save_config,
    save_dataset,
)
from sgcn.network import GcnChannel, ScatteringChannel

from shared_fixtures import two_clique_dataset


def write_fixture(directory, graph_lines, feature_lines, label_lines,
                  splits=((), (), ())):
    (directory / "graph.txt").write_text("\n".join(graph_lines) + "\n")
    (directory / "features.txt").write_text("\n".join(feature_lines) + "\n")
    (directory / "labels.txt").write_text("\n".join(label_lines) + "\n")
    for name, idx in zip(("train", "val", "test"), splits):
        (directory / f"split_{name}.txt").write_text(
            "".join(f"{i}\n" for i in idx))


def three_node_fixture(tmp_path):
    d = tmp_path / "ds"
    d.mkdir()
    write_fixture(
        d,
        ["3 2", "0 1 1.0", "1 2 0.5"],
        ["3 2", "1.0 3.0", "0.5 0.5", "0.0 0.0"],
        ["0", "1", "-1"],
        splits=((0,), (1,), ()),
    )
    return d


def test_load_three_node_fixture(tmp_path):
    ds = load_dataset(three_node_fixture(tmp_path))
    assert ds.graph.n == 3
    assert ds.graph.num_undirected_edges() == 2
    assert ds.labels.tolist() == [0, 1, -1]
    assert ds.masks["train"].tolist() == [0]
    # rows with positive sums are normalized to unit sum
    assert ds.features[0].sum() == 1.0
    assert np.allclose(ds.features[0], [0.25, 0.75])
    assert np.all(ds.features[2] == 0)  # zero row left alone


def test_round_trip_identity(tmp_path):
    ds = load_dataset(three_node_fixture(tmp_path))
    out = tmp_path / "copy"
    save_dataset(ds, out)
    ds2 = load_dataset(out)
    assert np.array_equal(ds2.features, ds.features)
    assert np.array_equal(ds2.labels, ds.labels)
    assert np.array_equal(ds2.graph.col_ids, ds.graph.col_ids)
    assert np.array_equal(ds2.graph.weights, ds.graph.weights)
    for name in ("train", "val", "test"):
        assert np.array_equal(ds2.masks[name], ds.masks[name])


def test_save_is_byte_stable(tmp_path):
    ds = two_clique_dataset()
    a, b = tmp_path / "a", tmp_path / "b"
    save_dataset(ds, a)
    save_dataset(ds, b)
    for name in ("graph.txt", "features.txt", "labels.txt", "split_train.txt"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_round_trip_through_binary_features(tmp_path):
    ds = two_clique_dataset()
    ds.features = row_normalize(ds.features)
    out = tmp_path / "bin"
    save_dataset(ds, out, binary_features=True)
    assert (out / "features.bin").exists()
    ds2 = load_dataset(out)
    assert np.array_equal(ds2.features, ds.features)


def test_binary_feature_format_layout(tmp_path):
    feats = np.arange(6, dtype=np.float64).reshape(2, 3)
    path = tmp_path / "features.bin"
    data_io.write_features_bin(path, feats)
    blob = path.read_bytes()
    assert blob[:6] == b"SGCNF1"
    assert int.from_bytes(blob[6:14], "little") == 2
    assert int.from_bytes(blob[14:22], "little") == 3
    assert np.array_equal(data_io.read_features_bin(path), feats)


def test_normalization_is_a_fixed_point():
    rng = np.random.default_rng(0)
    feats = rng.uniform(0, 2, size=(50, 20))
    feats[7] = 0.0
    once = row_normalize(feats)
    twice = row_normalize(once)
    assert np.array_equal(once, twice)


def test_empty_splits_are_valid(tmp_path):
    d = tmp_path / "ds"
    d.mkdir()
    write_fixture(
        d,
        ["2 1", "0 1 1.0"],
        ["2 1", "1.0", "2.0"],
        ["0", "1"],
    )
    ds = load_dataset(d)
    assert all(ds.masks[k].size == 0 for k in ("train", "val", "test"))


@pytest.mark.parametrize("mutation,match", [
    (lambda d: (d / "graph.txt").write_text("3 2\n0 1 1.0\n"),
     "promises 2 edges"),
    (lambda d: (d / "features.txt").write_text("3 2\n1.0 3.0\n0.5 0.5\n"),
     "promises 3 rows"),
    (lambda d: (d / "labels.txt").write_text("0\n1\n"),
     "expected 3 label lines"),
    (lambda d: (d / "split_val.txt").write_text("5\n"),
     "out of range"),
    (lambda d: (d / "split_val.txt").write_text("1\n1\n"),
     "duplicate node index"),
    (lambda d: (d / "features.txt").write_text("3 2\n1.0 3.0\nnope 1\n0 0\n"),
     "cannot parse"),
    (lambda d: (d / "graph.txt").write_text("3 2\n0 1 1.0\n0 1 2.0\n"),
     "duplicate edge"),
])
def test_malformed_files_report_location(tmp_path, mutation, match):
    d = three_node_fixture(tmp_path)
    mutation(d)
    with pytest.raises(FormatError, match=match):
        load_dataset(d)


def test_split_of_unlabeled_node_rejected(tmp_path):
    d = three_node_fixture(tmp_path)
    (d / "split_test.txt").write_text("2\n")  # node 2 is unlabeled
    with pytest.raises(ValueError, match="unlabeled"):
        load_dataset(d)


def test_overlapping_splits_rejected(tmp_path):
    d = three_node_fixture(tmp_path)
    (d / "split_val.txt").write_text("0\n")  # also in train
    with pytest.raises(ValueError, match="overlap"):
        load_dataset(d)


def test_weightless_edges_default_to_one(tmp_path):
    d = tmp_path / "ds"
    d.mkdir()
    write_fixture(d, ["2 1", "0 1"], ["2 1", "1.0", "1.0"], ["0", "1"])
    ds = load_dataset(d)
    assert ds.graph.weights.tolist() == [1.0, 1.0]


# --- config -------------------------------------------------------------------

def test_presets_mirror_published_table():
    cora = load_preset("cora")
    widths = [ch.width for ch in cora.layers[0]]
    assert widths == [10, 10, 10, 11, 6]
    assert cora.q == [4] and cora.alpha == 0.35
    assert cora.layers[0][3].path == (1,)
    assert cora.layers[0][4].path == (3,)

    cite = load_preset("citeseer")
    assert [ch.width for ch in cite.layers[0]] == [10, 10, 10, 9, 30]
    assert cite.alpha == 0.5
    # the two-step channel applies scale 3 first, then scale 2
    assert cite.layers[0][4].path == (3, 2)

    pubmed = load_preset("pubmed")
    assert [ch.width for ch in pubmed.layers[0]] == [10, 10, 10, 13, 14]
    assert pubmed.alpha == 1.0

    dblp = load_preset("dblp")
    assert len(dblp.layers) == 2
    assert dblp.q == [4, 1]
    assert [ch.width for ch in dblp.layers[1]] == [40, 20, 20, 20, 20]


def test_config_round_trip(tmp_path):
    cfg = load_preset("cora")
    path = tmp_path / "config.json"
    save_config(path, cfg)
    cfg2 = load_config(path)
    assert cfg2.layers == cfg.layers
    assert cfg2.q == cfg.q and cfg2.alpha == cfg.alpha
    assert cfg2.trainer == cfg.trainer


def test_config_rejects_unknown_keys(tmp_path):
    doc = load_preset("cora").to_dict()
    doc["trainer"]["learning_rate"] = 0.1  # wrong name
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    with pytest.raises(ValueError, match="unknown config key"):
        load_config(path)

    doc = load_preset("cora").to_dict()
    doc["surprise"] = True
    path.write_text(json.dumps(doc))
    with pytest.raises(ValueError, match="unknown config key"):
        load_config(path)


def test_config_model_spec_materializes():
    cfg = load_preset("cora")
    spec = cfg.model_spec(input_dim=1433, n_classes=7)
    assert spec.concat_width == 47
    assert isinstance(spec.layers[0][0], GcnChannel)
    assert isinstance(spec.layers[0][4], ScatteringChannel)


def test_unknown_preset():
    with pytest.raises(ValueError):
        load_preset("imagenet")

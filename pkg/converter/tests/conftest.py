import pytest

from archive_fixtures import SHAPES, make_archive


@pytest.fixture(scope="session")
def shaped_archive_factory(tmp_path_factory):
    cache = {}

    def factory(name):
        if name not in cache:
            nodes, edges, feats, classes, train, test, gaps = SHAPES[name]
            src = tmp_path_factory.mktemp(f"src_{name}")
            make_archive(src, name, nodes, edges, feats, classes, train, test,
                         seed=hash(name) % 2 ** 31, test_gaps=gaps,
                         extra_edge_mentions=7, raw_self_loops=3)
            cache[name] = src
        return cache[name]

    return factory

"""One-shot converter from public citation-network archives to the plain
interchange format of the sgcn toolkit."""

from .convert import (
    EXPECTED_COUNTS,
    ConversionManifest,
    CountMismatchError,
    convert,
    seeded_split,
    undirected_edges,
)
from .planetoid import ArchiveError, RawDataset, read_archive

__version__ = "0.1.0"

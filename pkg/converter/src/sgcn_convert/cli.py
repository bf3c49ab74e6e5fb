"""Command line: sgcn-convert <name> <src> <dst> [--seed N].

Prints the conversion manifest as JSON on stdout. Exit codes: 0 converted
and counts match, 1 counts mismatch (outputs still written for inspection),
2 usage or archive error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .convert import EXPECTED_COUNTS, CountMismatchError, convert
from .planetoid import ArchiveError


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="sgcn-convert",
                                     description=__doc__.splitlines()[0])
    parser.add_argument("name", help=f"one of {sorted(EXPECTED_COUNTS)}")
    parser.add_argument("src", help="directory holding the raw archive files")
    parser.add_argument("dst", help="output directory for interchange files")
    parser.add_argument("--seed", type=int, default=0,
                        help="seed for datasets whose split is drawn here")
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0

    try:
        manifest = convert(args.name, args.src, args.dst, seed=args.seed)
    except CountMismatchError as exc:
        print(f"count mismatch: {exc}", file=sys.stderr)
        json.dump(exc.manifest.to_dict(), sys.stdout, sort_keys=True)
        sys.stdout.write("\n")
        return 1
    except (ArchiveError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    json.dump(manifest.to_dict(), sys.stdout, sort_keys=True)
    sys.stdout.write("\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())

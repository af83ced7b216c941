#!/usr/bin/env python3
"""Build a service fixture for the editor tests.

Synthesizes a library large enough to exercise the tree at scale (well over
a thousand addressable elements), mines a small corpus against it, and writes
the three files `apislim serve` needs into the directory given as argv[1]:
api.json, usages.json, and an empty annotations.json.

The corpus drives one scenario the tests rely on: `Scorer(criterion=...)` is
called with two distinct string values, so the criterion parameter is useful
and its observed values prefill an enum form.
"""

import sys
from pathlib import Path

from apislim.annotations import AnnotationSet
from apislim.extractor import SourceTree, extract_api
from apislim.jsonutil import dump_json
from apislim.miner import Corpus, mine, usages_to_json_dict

LIBRARY = "biglib"
VERSION = "1.0"
MODULES = 8
CLASSES_PER_MODULE = 8


def write_library(root: Path) -> None:
    pkg = root / LIBRARY
    pkg.mkdir(parents=True)
    (pkg / "__init__.py").write_text('"""Synthetic library for editor tests."""\n')
    for m in range(MODULES):
        lines = [f'"""Module {m}."""\n\n']
        for c in range(CLASSES_PER_MODULE):
            lines.append(f"class Widget{m}_{c}:\n")
            lines.append(f'    """Widget {c} of module {m}."""\n\n')
            params = ", ".join(f"p{i}={i}" for i in range(5))
            lines.append(f"    def __init__(self, {params}):\n")
            lines.append("        pass\n\n")
            lines.append("    def run(self, a, b=1, c='x'):\n")
            lines.append("        pass\n\n")
            lines.append("    def tune(self, x, y=None, z=False):\n")
            lines.append("        pass\n\n")
        lines.append(f"def helper_{m}_0(a, b=2):\n    pass\n\n")
        lines.append(f"def helper_{m}_1(s='s', t=True):\n    pass\n")
        (pkg / f"mod{m}.py").write_text("".join(lines))
    (pkg / "metrics.py").write_text(
        '"""Scoring module."""\n\n\n'
        "class Scorer:\n"
        '    """Scores things by one of a closed set of criteria."""\n\n'
        "    def __init__(self, criterion='gini', depth=3):\n"
        "        self.criterion = criterion\n"
        "        self.depth = depth\n\n"
        "    def score(self, x, weight=None):\n"
        "        return 0\n"
    )


def write_corpus(root: Path) -> None:
    root.mkdir(parents=True)
    (root / "client0.py").write_text(
        "import biglib.metrics\n\n"
        "s = biglib.metrics.Scorer(criterion='gini')\n"
        "s.score(1)\n"
    )
    (root / "client1.py").write_text(
        "from biglib.metrics import Scorer\n\n"
        "Scorer(criterion='entropy').score(2, weight=0.5)\n"
    )
    (root / "client2.py").write_text(
        "from biglib.metrics import Scorer\n\n"
        "Scorer(criterion='gini', depth=5)\n"
    )
    (root / "client3.py").write_text(
        "from biglib.mod0 import Widget0_0\n\n"
        "Widget0_0(p0=1).run(10)\n"
        "Widget0_0(p0=2)\n"
    )


def main() -> int:
    if len(sys.argv) != 2:
        print("usage: make_editor_fixture.py OUTDIR", file=sys.stderr)
        return 2
    out = Path(sys.argv[1])
    lib_root = out / "lib"
    corpus_root = out / "corpus"
    write_library(lib_root)
    write_corpus(corpus_root)

    model, _report = extract_api(SourceTree.at(lib_root), VERSION)
    counts, mining_report, lints = mine(Corpus.at(corpus_root), model, jobs=1)

    dump_json(model.to_json_dict(), out / "api.json")
    dump_json(usages_to_json_dict(model, counts, mining_report, lints), out / "usages.json")
    empty = AnnotationSet.empty(model.library_name, model.library_version)
    dump_json(empty.to_json_dict(), out / "annotations.json")

    elements = sum(1 for _ in model.iter_classes()) + sum(1 for _ in model.iter_callables())
    params = sum(1 for _ in model.iter_parameters())
    total = len(model.modules) + elements + params
    print(f"fixture ready: {total} elements under {out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

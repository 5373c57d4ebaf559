from __future__ import annotations

import json
import shutil
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # for `oracles`

from codesim.frontend import SourceUnit, parse_unit
from codesim.indexing import build_database
from codesim.syngen import write_distractor_corpus, write_manifest

REPO_ROOT = Path(__file__).resolve().parent.parent
PLANTED_DIR = REPO_ROOT / "benchmarks" / "planted"

# The paper-anchored extraction fixture: an iterative binary search whose
# observations are pinned by the acceptance suite.
BINSEARCH_SRC = """\
int binSearch(int a[], int n, int match)
{
    int low = 0;
    int high = n - 1;

    while (low <= high) {
        int mid = (low + high) / 2;
        if (match < a[mid])
            high = mid - 1;
        else if (match > a[mid])
            low = mid + 1;
        else
            return mid;   /* found match */
    }
    return -1;   /* no match */
}
"""


@pytest.fixture
def binsearch_ir():
    functions = parse_unit(SourceUnit("fix/binsearch.c", BINSEARCH_SRC, "fixture"))
    assert len(functions) == 1
    return functions[0]


@pytest.fixture(scope="session")
def planted_corpus(tmp_path_factory):
    """Planted benchmark groups + 1020 synthetic distractors, indexed once."""
    root = tmp_path_factory.mktemp("planted_corpus")
    shutil.copytree(PLANTED_DIR, root / "planted")
    entries = []
    for group_dir in sorted((root / "planted").iterdir()):
        if not group_dir.is_dir():
            continue
        for src in sorted(group_dir.glob("*.c")):
            entries.append({
                "path": f"planted/{group_dir.name}/{src.name}",
                "project_id": f"planted-{group_dir.name}",
            })
    entries.extend(write_distractor_corpus(str(root), count=1020, seed=20240811))
    manifest = root / "manifest.json"
    write_manifest(str(manifest), entries)
    db = build_database(str(manifest))
    with open(PLANTED_DIR / "groundtruth.json", "r", encoding="utf-8") as handle:
        groundtruth = json.load(handle)
    return db, groundtruth, root

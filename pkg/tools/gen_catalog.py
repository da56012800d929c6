"""Regenerate the shipped catalog files from the programmatic builder.

Run from the repository root:

    python3 tools/gen_catalog.py

Rewrites src/provingground/data/catalog/** in place. The test suite
asserts that the shipped files match the builder output, so commit the
result whenever the builder changes.
"""

from __future__ import annotations

import shutil
import sys
from pathlib import Path

import yaml

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from provingground.scenario.builder import CATALOG_VERSION, build_documents  # noqa: E402
from provingground.scenario.parser import serialize_scenario  # noqa: E402


def main() -> None:
    out_root = ROOT / "src" / "provingground" / "data" / "catalog"
    if out_root.exists():
        shutil.rmtree(out_root)
    categories: dict[str, list[str]] = {}
    for doc in build_documents():
        rel = f"{doc.category}/{doc.document_id}.yaml"
        path = out_root / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(serialize_scenario(doc), encoding="utf-8")
        categories.setdefault(doc.category, []).append(rel)
    manifest = {"version": CATALOG_VERSION, "categories": categories}
    (out_root / "manifest.yaml").write_text(
        yaml.safe_dump(manifest, sort_keys=False), encoding="utf-8"
    )
    count = sum(len(v) for v in categories.values())
    print(f"wrote {count} documents under {out_root}")


if __name__ == "__main__":
    main()

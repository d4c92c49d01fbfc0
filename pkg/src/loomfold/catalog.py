"""The built-in catalog of (matrix, twist) pairs and external overrides.

The built-ins cover every branch of the closed-form weight list (all three
orbit cases, every twist order up to 6 on the cycles) and both special
locality types.  Setting LOOMFOLD_CATALOG to a JSON file replaces the list.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

from loomfold.cartan import Gcm, canonical_matrix
from loomfold.errors import JobError
from loomfold.folding import DiagramAut, validate_aut

ENV_VAR = "LOOMFOLD_CATALOG"


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    gcm: Gcm
    mu: DiagramAut

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "cartan": [list(r) for r in self.gcm.entries],
            "mu": list(self.mu.perm),
        }


def _entry(name: str, label: str, perm) -> CatalogEntry:
    gcm = Gcm(canonical_matrix(label))
    return CatalogEntry(name, gcm, validate_aut(gcm, perm))


def builtin_entries() -> list[CatalogEntry]:
    return [
        _entry("A2-id", "A2", [0, 1]),
        _entry("A2-flip", "A2", [1, 0]),
        _entry("A3-flip", "A3", [2, 1, 0]),
        _entry("A4-flip", "A4", [3, 2, 1, 0]),
        _entry("A5-flip", "A5", [4, 3, 2, 1, 0]),
        _entry("D4-flip", "D4", [0, 1, 3, 2]),
        _entry("D4-triality", "D4", [2, 1, 3, 0]),
        _entry("E6-flip", "E6", [4, 3, 2, 1, 0, 5]),
        _entry("A1a-id", "A1^(1)", [0, 1]),
        _entry("A1a-flip", "A1^(1)", [1, 0]),
        _entry("A2a-id", "A2^(1)", [0, 1, 2]),
        _entry("A2a-flip", "A2^(1)", [0, 2, 1]),
        _entry("A2a-rot", "A2^(1)", [1, 2, 0]),
        _entry("A3a-rot", "A3^(1)", [1, 2, 3, 0]),
        _entry("A4a-rot", "A4^(1)", [1, 2, 3, 4, 0]),
        _entry("A5a-rot", "A5^(1)", [1, 2, 3, 4, 5, 0]),
        _entry("D4a-triality", "D4^(1)", [0, 3, 2, 4, 1]),
    ]


def load_entries(path: str | None = None) -> list[CatalogEntry]:
    """Entries from an explicit path, the environment override, or built-ins."""
    path = path or os.environ.get(ENV_VAR)
    if not path:
        return builtin_entries()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise JobError(f"cannot read catalog {path}: {exc}") from exc
    if not isinstance(raw, list):
        raise JobError("catalog file must hold a list of entries")
    out = []
    for item in raw:
        try:
            gcm = Gcm(item["cartan"])
            mu = validate_aut(gcm, item["mu"])
            out.append(CatalogEntry(str(item["name"]), gcm, mu))
        except (KeyError, TypeError) as exc:
            raise JobError(f"bad catalog entry: {exc}") from exc
    return out


def entry_by_name(name: str, path: str | None = None) -> CatalogEntry:
    for entry in load_entries(path):
        if entry.name == name:
            return entry
    raise JobError(f"no catalog entry named {name!r}")

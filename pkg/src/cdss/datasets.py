"""Built-in dataset registry.

The breast (WDBC) raw file ships inside the package. The heart and mammo
raw UCI files are not redistributable here; drop `processed.cleveland.data`
and `mammographic_masses.data` into a directory named by `CDSS_DATA_DIR`
(or pass an explicit path) and the same schemas apply.
"""

from __future__ import annotations

import os
from importlib import resources

from .dataset import Dataset, Schema, load_csv
from .errors import DataError

REGISTRY = {
    "heart": ("heart.schema.json", "processed.cleveland.data"),
    "breast": ("breast.schema.json", "wdbc.data"),
    "mammo": ("mammo.schema.json", "mammographic_masses.data"),
}


def _resource_path(name: str) -> str | None:
    ref = resources.files("cdss").joinpath("resources", name)
    try:
        if ref.is_file():
            return str(ref)
    except OSError:
        pass
    return None


def builtin_schema(name: str) -> Schema:
    if name not in REGISTRY:
        raise DataError(f"unknown dataset {name!r}; known: {sorted(REGISTRY)}")
    return Schema.from_json(_resource_path(REGISTRY[name][0]))


def find_data_file(name: str) -> str | None:
    """Search order: packaged resources, $CDSS_DATA_DIR, ./data, cwd."""
    filename = REGISTRY[name][1]
    packaged = _resource_path(filename)
    if packaged:
        return packaged
    candidates = []
    env = os.environ.get("CDSS_DATA_DIR")
    if env:
        candidates.append(os.path.join(env, filename))
    candidates.append(os.path.join("data", filename))
    candidates.append(filename)
    for c in candidates:
        if os.path.isfile(c):
            return c
    return None


def load_builtin(name: str, data_path: str | None = None) -> Dataset:
    schema = builtin_schema(name)
    path = data_path or find_data_file(name)
    if path is None:
        raise DataError(
            f"raw file {REGISTRY[name][1]!r} for dataset {name!r} not found; "
            "set CDSS_DATA_DIR or pass an explicit path"
        )
    return load_csv(path, schema)


def available(name: str) -> bool:
    return name in REGISTRY and find_data_file(name) is not None

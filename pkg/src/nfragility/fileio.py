"""JSON matrix files and scenario configs."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .linalg import as_matrix


def matrix_to_dict(m) -> dict:
    m = as_matrix(m)
    flat = m.ravel()  # row-major
    return {"dim": m.shape[0], "re": flat.real.tolist(), "im": flat.imag.tolist()}


def matrix_from_dict(doc: dict) -> np.ndarray:
    try:
        n = int(doc["dim"])
        re = np.asarray(doc["re"], dtype=float)
        im = np.asarray(doc.get("im", [0.0] * (n * n)), dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed matrix document: {exc}") from exc
    if n < 1 or re.size != n * n or im.size != n * n:
        raise ValueError(f"matrix document declares dim {n} but has {re.size}/{im.size} entries")
    return as_matrix((re + 1j * im).reshape(n, n))


def load_matrix(path) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        return matrix_from_dict(json.load(fh))


def save_matrix(m, path) -> None:
    Path(path).write_text(json.dumps(matrix_to_dict(m)), encoding="utf-8")


def load_config(path) -> dict:
    """Scenario config ``{"scenario", "params", "grid": {"t_max", "points"}, "fock_dim"}``."""
    with open(path, encoding="utf-8") as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise ValueError("scenario config must be a JSON object")
    cfg.setdefault("params", {})
    cfg.setdefault("grid", {})
    return cfg

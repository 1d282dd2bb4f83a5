"""Regenerate ``data/windows.json``: ``python -m gabinv._catalog > src/gabinv/data/windows.json``."""

from __future__ import annotations

import json
import sys

from .cases import BASE_LATTICE, CASES
from .invariance import geometry
from .lattice import parse_lattice
from .windows import window_from_mask
from .zak import ZakSplit

CATALOG_SPLIT = ZakSplit(32, 4)


def build_catalog() -> dict:
    entries = [
        {"name": "indicator", "provenance": "worked example: chi_[0,1), |Z phi| = 1",
         "spec": {"kind": "indicator"}},
        {"name": "gaussian", "provenance": "synthetic: unit-norm Gaussian, sigma = 1",
         "spec": {"kind": "gaussian", "sigma": 1.0}},
        {"name": "gaussian_wide", "provenance": "synthetic: unit-norm Gaussian, sigma = 2",
         "spec": {"kind": "gaussian", "sigma": 2.0}},
        {"name": "delta", "provenance": "synthetic: delta at 0, L = 32",
         "spec": {"kind": "finite_vector", "L": 32, "values": [[1.0, 0.0]] + [[0.0, 0.0]] * 31}},
    ]
    lam = parse_lattice(BASE_LATTICE)
    for c in CASES:
        mask = geometry(lam, c.tilde, CATALOG_SPLIT.resolution).masks.masks[0]
        spec = window_from_mask(mask, CATALOG_SPLIT)
        entries.append({
            "name": f"mask_case_{c.name}",
            "provenance": f"worked example case ({c.name}): Z phi = chi of B^(0) at L=32, N=4",
            "spec": spec.to_json(),
        })
    return {"windows": entries}


if __name__ == "__main__":  # pragma: no cover
    json.dump(build_catalog(), sys.stdout, indent=1)
    sys.stdout.write("\n")

"""Window ingestion, validation, catalog and Zak-pattern fixtures."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Any

import numpy as np

from .lattice import LatticeError, parse_lattice
from .zak import WindowSpec, ZakError, ZakGrid, ZakSplit, analytic_zak, inverse_finite_zak

__all__ = [
    "WindowError",
    "WindowCatalogEntry",
    "parse_window",
    "window_from_json",
    "window_from_mask",
    "resolve_window",
    "load_catalog",
    "catalog_window",
    "model_from_json",
    "load_window_arg",
]


class WindowError(ValueError):
    """Schema violation; ``path`` points at the offending field (``$.sigma``)."""

    def __init__(self, path: str, msg: str):
        self.path = path
        super().__init__(f"{path}: {msg}")


def _reject_constant(name: str):
    raise WindowError("$", f"non-finite number {name} is not allowed")


def _number(obj: Any, path: str) -> float:
    if isinstance(obj, bool) or not isinstance(obj, (int, float)):
        raise WindowError(path, "expected a number")
    if not math.isfinite(obj):
        raise WindowError(path, "non-finite number")
    return float(obj)


def _complex_list(obj: Any, path: str) -> np.ndarray:
    if not isinstance(obj, list):
        raise WindowError(path, "expected a list of [re, im] pairs")
    out = np.empty(len(obj), dtype=complex)
    for k, pair in enumerate(obj):
        p = f"{path}[{k}]"
        if isinstance(pair, (int, float)) and not isinstance(pair, bool):
            out[k] = _number(pair, p)
            continue
        if not (isinstance(pair, list) and len(pair) == 2):
            raise WindowError(p, "expected [re, im]")
        out[k] = complex(_number(pair[0], p + "[0]"), _number(pair[1], p + "[1]"))
    return out


def _positive_int(obj: Any, path: str) -> int:
    if isinstance(obj, bool) or not isinstance(obj, int) or obj < 1:
        raise WindowError(path, "expected a positive integer")
    return obj


def window_from_json(data: Any, path: str = "$") -> WindowSpec:
    """Validate a decoded JSON object into a :class:`WindowSpec`."""
    if not isinstance(data, dict):
        raise WindowError(path, "window must be a JSON object")
    kind = data.get("kind")
    if kind not in ("indicator", "gaussian", "finite_vector", "explicit_zak"):
        raise WindowError(f"{path}.kind", f"unknown window kind {kind!r}")
    d = data.get("d", 1)
    if d not in (1, 2):
        raise WindowError(f"{path}.d", "d must be 1 or 2")
    if kind == "indicator":
        width = data.get("width", 1)
        try:
            w = Fraction(str(width))
        except (ValueError, ZeroDivisionError):
            raise WindowError(f"{path}.width", "expected a rational number") from None
        if w <= 0:
            raise WindowError(f"{path}.width", "width must be positive")
        return WindowSpec("indicator", width=w, d=d)
    if kind == "gaussian":
        if "sigma" not in data:
            raise WindowError(f"{path}.sigma", "missing")
        sigma = _number(data["sigma"], f"{path}.sigma")
        if sigma <= 0:
            raise WindowError(f"{path}.sigma", "sigma must be positive")
        return WindowSpec("gaussian", sigma=sigma, d=d)
    if kind == "finite_vector":
        L = _positive_int(data.get("L"), f"{path}.L")
        vals = _complex_list(data.get("values"), f"{path}.values")
        if vals.shape[0] != L:
            raise WindowError(f"{path}.values", f"expected {L} entries, got {vals.shape[0]}")
        if data.get("normalize", False):
            n = np.linalg.norm(vals)
            if n == 0:
                raise WindowError(f"{path}.values", "cannot normalize the zero vector")
            vals = vals / n
        return WindowSpec("finite_vector", values=vals, L=L)
    P = _positive_int(data.get("P"), f"{path}.P")
    Q = _positive_int(data.get("Q"), f"{path}.Q")
    vals = _complex_list(data.get("values"), f"{path}.values")
    shape = (P, Q) if d == 1 else (P, P, Q, Q)
    if vals.size != int(np.prod(shape)):
        raise WindowError(f"{path}.values", f"expected {int(np.prod(shape))} entries, got {vals.size}")
    return WindowSpec("explicit_zak", values=vals.reshape(shape), d=d)


def parse_window(text: str) -> WindowSpec:
    try:
        data = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise WindowError("$", f"malformed JSON: {exc}") from None
    return window_from_json(data)


def window_from_mask(mask, split: ZakSplit, phase: str = "one", seed: int | None = None) -> WindowSpec:
    """Finite window whose Zak transform is ``mask`` times unit phases.

    ``phase="one"`` uses the constant phase; ``phase="random"`` draws
    uniform phases from ``numpy.random.default_rng(seed)``.
    """
    m = np.asarray(mask, dtype=bool)
    if m.shape != split.resolution:
        raise WindowError("$.mask", f"mask shape {m.shape} does not match the split {split.resolution}")
    if phase == "one":
        z = m.astype(complex)
    elif phase == "random":
        rng = np.random.default_rng(seed)
        z = m * np.exp(2j * np.pi * rng.random(m.shape))
    else:
        raise WindowError("$.phase", f"unknown phase rule {phase!r}")
    return WindowSpec("finite_vector", values=inverse_finite_zak(ZakGrid(z, split=split)), L=split.L)


def resolve_window(spec: WindowSpec, split: ZakSplit) -> np.ndarray:
    """Vector in ``C^L`` for the finite model at ``split``.

    Continuous windows are sampled on the Zak grid ``(N, M)`` and read as a
    finite Zak transform; finite vectors must already have length ``L``.
    """
    if spec.d != 1:
        raise WindowError("$.d", "the finite model is one-dimensional")
    if spec.kind == "finite_vector":
        if spec.L != split.L:
            raise WindowError("$.L", f"window has L={spec.L}, the model needs L={split.L}")
        return np.array(spec.values)
    grid = analytic_zak(spec, split.resolution, split=split)
    return inverse_finite_zak(grid)


@dataclass(frozen=True, eq=False)
class WindowCatalogEntry:
    name: str
    spec: WindowSpec
    provenance: str


@lru_cache(maxsize=1)
def load_catalog() -> dict[str, WindowCatalogEntry]:
    raw = json.loads(resources.files("gabinv").joinpath("data/windows.json").read_text(encoding="utf-8"))
    out = {}
    for k, entry in enumerate(raw["windows"]):
        name = entry["name"]
        spec = window_from_json(entry["spec"], f"$.windows[{k}].spec")
        out[name] = WindowCatalogEntry(name, spec, entry.get("provenance", ""))
    return out


def catalog_window(name: str) -> WindowSpec:
    cat = load_catalog()
    if name not in cat:
        raise WindowError("$.name", f"no catalog window named {name!r}; known: {', '.join(sorted(cat))}")
    return cat[name].spec


def load_window_arg(arg: str) -> WindowSpec:
    """``catalog:NAME`` or a path to a window JSON file."""
    if arg.startswith("catalog:"):
        return catalog_window(arg.split(":", 1)[1])
    try:
        with open(arg, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise WindowError("$", f"cannot read window file {arg!r}: {exc.strerror}") from None
    return parse_window(text)


def model_from_json(text: str):
    """``{"L":32,"N":4,"lattice":"16,0;0,16","window":{...}}`` to a finite model."""
    from .finite_gabor import FiniteGaborModel

    try:
        data = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise WindowError("$", f"malformed JSON: {exc}") from None
    if not isinstance(data, dict):
        raise WindowError("$", "model must be a JSON object")
    L = _positive_int(data.get("L"), "$.L")
    N = _positive_int(data.get("N"), "$.N")
    try:
        split = ZakSplit(L, N)
    except ZakError as exc:
        raise WindowError("$.N", str(exc)) from None
    if not isinstance(data.get("lattice"), str):
        raise WindowError("$.lattice", "expected a lattice string")
    try:
        lat = parse_lattice(data["lattice"])
    except LatticeError as exc:
        raise WindowError("$.lattice", str(exc)) from None
    spec = window_from_json(data.get("window"), "$.window")
    try:
        return FiniteGaborModel(split, lat, resolve_window(spec, split))
    except LatticeError as exc:
        raise WindowError("$.lattice", str(exc)) from None


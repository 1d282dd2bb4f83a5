"""Finite and sampled Zak transforms.

A :class:`ZakGrid` stores values of ``Zf`` at the nodes ``(i/P, j/Q)`` of the
unit cell ``[0,1)^{2d}`` (``d`` in {1, 2}).  In finite mode the grid is the
finite Zak transform of a vector in ``C^L`` with ``P = N`` and ``Q = M``, so
model unit 1 in time is ``N`` samples and model unit 1 in frequency is ``M``
bins.  Every routine here works in model units unless it says otherwise.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

__all__ = [
    "ZakError",
    "ZakSplit",
    "ZakGrid",
    "WindowSpec",
    "finite_zak",
    "inverse_finite_zak",
    "extend",
    "zak_shift_image",
    "analytic_zak",
    "rescale",
    "gaussian_truncation",
    "grid_to_csv",
    "DEFAULT_TAU",
]

DEFAULT_TAU = 1e-9
GAUSSIAN_TAIL = 1e-15
GAUSSIAN_MAX_TERMS = 100_000


class ZakError(ValueError):
    pass


@dataclass(frozen=True)
class ZakSplit:
    """``L = N * M`` with ``N`` samples per time unit and ``M`` bins per frequency unit."""

    L: int
    N: int

    def __post_init__(self):
        if not (isinstance(self.L, (int, np.integer)) and isinstance(self.N, (int, np.integer))):
            raise ZakError("L and N must be integers")
        if self.L < 1 or self.N < 1 or self.L % self.N:
            raise ZakError(f"N={self.N} must be a positive divisor of L={self.L}")

    @property
    def M(self) -> int:
        return self.L // self.N

    @property
    def resolution(self) -> tuple[int, int]:
        return (self.N, self.M)


@dataclass(frozen=True, eq=False)
class ZakGrid:
    """Samples of a Zak transform on the base cell.

    ``values[i_1..i_d, j_1..j_d]`` is ``Zf(i/P, j/Q)``.  ``zero_tolerance`` is
    the absolute threshold below which a value counts as zero; by default it
    is ``1e-9 * max|values|``.
    """

    values: np.ndarray
    split: ZakSplit | None = None
    zero_tolerance: float | None = None
    mode: str = field(init=False)

    def __post_init__(self):
        vals = np.array(self.values, dtype=complex)
        if vals.ndim not in (2, 4):
            raise ZakError("Zak grids need 2 (d=1) or 4 (d=2) axes")
        if not np.all(np.isfinite(vals)):
            raise ZakError("Zak grid values must be finite")
        if self.split is not None and vals.shape != self.split.resolution:
            raise ZakError(f"grid shape {vals.shape} does not match split {self.split.resolution}")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "mode", "finite" if self.split is not None else "continuous")
        if self.zero_tolerance is None:
            peak = float(np.max(np.abs(vals))) if vals.size else 0.0
            object.__setattr__(self, "zero_tolerance", DEFAULT_TAU * peak)
        elif self.zero_tolerance < 0:
            raise ZakError("zero tolerance must be nonnegative")

    @property
    def d(self) -> int:
        return self.values.ndim // 2

    @property
    def resolution(self) -> tuple[int, ...]:
        return self.values.shape

    @property
    def time_res(self) -> tuple[int, ...]:
        return self.values.shape[: self.d]

    @property
    def freq_res(self) -> tuple[int, ...]:
        return self.values.shape[self.d:]

    def nonzero(self, tau: float | None = None) -> np.ndarray:
        """Boolean support: ``|Z| > tau * max|Z|`` (or the stored tolerance)."""
        return np.abs(self.values) > self.threshold(tau)

    def threshold(self, tau: float | None = None) -> float:
        if tau is None:
            return float(self.zero_tolerance)
        return float(tau) * float(np.max(np.abs(self.values), initial=0.0))

    def with_values(self, values: np.ndarray) -> "ZakGrid":
        return ZakGrid(values, split=self.split)

    def node_coordinates(self) -> list[np.ndarray]:
        """Model-unit coordinate arrays (broadcastable), one per axis."""
        res = self.resolution
        out = []
        for ax, r in enumerate(res):
            shape = [1] * len(res)
            shape[ax] = r
            out.append((np.arange(r) / r).reshape(shape))
        return out

    def __repr__(self) -> str:
        return f"ZakGrid(mode={self.mode!r}, resolution={self.resolution})"


# -- finite transform ---------------------------------------------------------

def finite_zak(f, split: ZakSplit) -> ZakGrid:
    """``Zf(x, w) = M^{-1/2} sum_k f(x + kN) exp(-2 pi i k w / M)``."""
    vec = np.asarray(f, dtype=complex)
    if vec.ndim != 1 or vec.shape[0] != split.L:
        raise ZakError(f"expected a vector of length {split.L}, got shape {vec.shape}")
    z = np.fft.fft(vec.reshape(split.M, split.N), axis=0, norm="ortho").T
    return ZakGrid(z, split=split)


def inverse_finite_zak(grid: ZakGrid) -> np.ndarray:
    if grid.mode != "finite":
        raise ZakError("continuous-mode grid has no sample-domain inverse")
    return np.fft.ifft(grid.values.T, axis=0, norm="ortho").reshape(grid.split.L)


# -- quasi-periodic extension -------------------------------------------------

def _to_index(grid: ZakGrid, point: Sequence, units: str) -> tuple[int, ...]:
    if len(point) != grid.values.ndim:
        raise ZakError("point dimension does not match the grid")
    if units == "index":
        if any(Fraction(p).denominator != 1 for p in point):
            raise ZakError("index-unit points must be integers")
        return tuple(int(p) for p in point)
    if units != "model":
        raise ZakError(f"unknown units {units!r}")
    idx = []
    for p, r in zip(point, grid.resolution):
        q = Fraction(p) * r if not isinstance(p, float) else Fraction(p).limit_denominator(10**9) * r
        if q.denominator != 1:
            raise ZakError(f"point {tuple(point)} is not on the extended grid")
        idx.append(int(q))
    return tuple(idx)


def extend(grid: ZakGrid, point: Sequence, units: str = "model") -> complex:
    """Value at any node of the extended grid via ``Z(x+k, w+l) = e^{2 pi i k.w} Z(x, w)``.

    ``units="model"`` takes ``(x, w)`` in model units; ``units="index"`` takes
    integer node indices.
    """
    idx = _to_index(grid, point, units)
    d = grid.d
    res = grid.resolution
    turns = Fraction(0)
    base = []
    for t in range(d):
        k, i0 = divmod(idx[t], res[t])
        turns += k * Fraction(idx[d + t], res[d + t])
        base.append(i0)
    for t in range(d):
        base.append(idx[d + t] % res[d + t])
    turns -= math.floor(turns)
    return complex(np.exp(2j * np.pi * float(turns)) * grid.values[tuple(base)])


def _shift_indices(grid: ZakGrid, shift_idx: Sequence[int]):
    """Index arrays and phase for ``Z_ext(n - s)`` evaluated on every node ``n``."""
    d = grid.d
    res = grid.resolution
    nodes = np.indices(res)
    src = []
    turns = np.zeros(res)
    for t in range(d):
        x = nodes[t] - shift_idx[t]
        k = np.floor_divide(x, res[t])
        src.append(x - k * res[t])
        w = nodes[d + t] - shift_idx[d + t]
        turns = turns + (k * w % res[d + t]) / res[d + t]
    for t in range(d):
        src.append(np.mod(nodes[d + t] - shift_idx[d + t], res[d + t]))
    return tuple(src), turns


def zak_shift_image(grid: ZakGrid, shift: Sequence, units: str = "model") -> ZakGrid:
    """Zak grid of ``pi(u, eta) f`` from the grid of ``f``.

    ``Z[pi(u,eta) f](x, w) = e^{2 pi i eta.x} Zf(x - u, w - eta)``.  In finite
    mode with ``units="index"`` the shift is in samples and bins, which is the
    same as model units ``(u/N, eta/M)``.
    """
    s = _to_index(grid, shift, units)
    d = grid.d
    res = grid.resolution
    src, turns = _shift_indices(grid, s)
    nodes = np.indices(res)
    for t in range(d):
        # eta.x in model units: (s_eta / Q) * (i / P)
        num = (s[d + t] * nodes[t]) % (res[t] * res[d + t])
        turns = turns + num / (res[t] * res[d + t])
    values = np.exp(2j * np.pi * np.mod(turns, 1.0)) * grid.values[src]
    return ZakGrid(values, split=grid.split)


def roll_abs(arr: np.ndarray, shift_idx: Sequence[int]) -> np.ndarray:
    """``arr[n + r]`` with periodic wrap; valid for quantities with no quasi-periodic phase."""
    return np.roll(arr, tuple(-int(r) for r in shift_idx), axis=tuple(range(arr.ndim)))


# -- windows ------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class WindowSpec:
    """A window description.

    kinds: ``indicator`` (``width`` w gives ``w^{-1/2} chi_[0,w)``, w=1 by
    default), ``gaussian`` (``sigma``), ``finite_vector`` (``values`` of
    length ``L``) and ``explicit_zak`` (``grid`` values on ``P x Q``).
    """

    kind: str
    sigma: float | None = None
    width: Fraction = Fraction(1)
    values: np.ndarray | None = None
    L: int | None = None
    d: int = 1

    def __post_init__(self):
        if self.kind not in ("indicator", "gaussian", "finite_vector", "explicit_zak"):
            raise ZakError(f"unknown window kind {self.kind!r}")
        if self.d not in (1, 2):
            raise ZakError("only d = 1 or d = 2 is supported")
        if self.kind == "gaussian":
            if self.sigma is None or not math.isfinite(self.sigma) or self.sigma <= 0:
                raise ZakError("sigma must be positive")
        if self.kind == "indicator":
            object.__setattr__(self, "width", Fraction(self.width))
            if self.width <= 0:
                raise ZakError("indicator width must be positive")
        if self.kind in ("finite_vector", "explicit_zak"):
            if self.values is None:
                raise ZakError(f"{self.kind} needs values")
            vals = np.array(self.values, dtype=complex)
            if not np.all(np.isfinite(vals)):
                raise ZakError("window values must be finite")
            vals.setflags(write=False)
            object.__setattr__(self, "values", vals)
        if self.kind == "finite_vector":
            if self.values.ndim != 1 or (self.L is not None and self.values.shape[0] != self.L):
                raise ZakError("finite_vector length must equal L")
            object.__setattr__(self, "L", int(self.values.shape[0]))
            object.__setattr__(self, "d", 1)
        if self.kind == "explicit_zak":
            ZakGrid(self.values)  # validates shape
            object.__setattr__(self, "d", self.values.ndim // 2)

    def to_json(self) -> dict:
        if self.kind == "indicator":
            out = {"kind": "indicator"}
            if self.width != 1:
                out["width"] = str(self.width)
            return out
        if self.kind == "gaussian":
            return {"kind": "gaussian", "sigma": self.sigma}
        if self.kind == "finite_vector":
            return {"kind": "finite_vector", "L": self.L,
                    "values": [[float(v.real), float(v.imag)] for v in self.values]}
        res = self.values.shape
        return {"kind": "explicit_zak", "P": res[0], "Q": res[-1],
                "values": [[float(v.real), float(v.imag)] for v in self.values.ravel()]}


def gaussian_truncation(sigma: float, tail: float = GAUSSIAN_TAIL) -> int:
    """Smallest K with ``sum_{|k|>K} exp(-pi (k-1)^2 / sigma^2) < tail``."""
    # the two-sided tail is bounded by 2 * sum_{j >= K} exp(-pi j^2 / sigma^2)
    j = np.arange(GAUSSIAN_MAX_TERMS + 1, dtype=float)
    terms = 2.0 * np.exp(-np.pi * j**2 / sigma**2)
    tails = np.cumsum(terms[::-1])[::-1]  # tails[K] = sum_{j >= K}
    ok = np.nonzero(tails[1:] < tail)[0]
    if ok.size == 0:
        raise ZakError(f"gaussian truncation cannot reach {tail} within {GAUSSIAN_MAX_TERMS} terms")
    return int(ok[0]) + 1


def _gaussian_zak_1d(sigma: float, P: int, Q: int, K: int | None = None) -> np.ndarray:
    K = gaussian_truncation(sigma) if K is None else K
    x = np.arange(P)[:, None] / P
    norm = (math.sqrt(2.0) / sigma) ** 0.5
    out = np.zeros((P, Q), dtype=complex)
    for k in range(-K, K + 1):
        # exp(-2 pi i k w) with k w reduced mod 1 keeps the phases accurate
        phase = np.exp(-2j * np.pi * np.mod(k * np.arange(Q), Q) / Q)[None, :]
        out += norm * np.exp(-np.pi * (x + k) ** 2 / sigma**2) * phase
    return out


def _indicator_zak_1d(width: Fraction, P: int, Q: int) -> np.ndarray:
    if width == 1:
        return np.ones((P, Q), dtype=complex)
    amp = float(width) ** -0.5
    out = np.zeros((P, Q), dtype=complex)
    for i in range(P):
        x = Fraction(i, P)
        k = math.ceil(-x)
        while x + k < width:
            out[i, :] += amp * np.exp(-2j * np.pi * np.mod(k * np.arange(Q), Q) / Q)
            k += 1
    return out


def _tensor(grid_1d: np.ndarray, d: int) -> np.ndarray:
    if d == 1:
        return grid_1d
    # axes (x1, x2, w1, w2)
    return np.einsum("ac,bd->abcd", grid_1d, grid_1d)


def analytic_zak(spec: WindowSpec, resolution: Sequence[int], split: ZakSplit | None = None) -> ZakGrid:
    """Zak grid of a catalog window on ``P x Q`` (per axis for d = 2).

    ``resolution`` is ``(P, Q)`` and is reused on every axis when ``d = 2``.
    A ``finite_vector`` window needs ``P * Q == L`` and is transformed with
    the finite Zak (``N = P``).
    """
    res = tuple(int(r) for r in resolution)
    if len(res) != 2 or min(res) < 1:
        raise ZakError("resolution must be two positive integers (P, Q)")
    P, Q = res
    if spec.kind == "indicator":
        return ZakGrid(_tensor(_indicator_zak_1d(spec.width, P, Q), spec.d), split=split)
    if spec.kind == "gaussian":
        return ZakGrid(_tensor(_gaussian_zak_1d(spec.sigma, P, Q), spec.d), split=split)
    if spec.kind == "finite_vector":
        if P * Q != spec.L:
            raise ZakError(f"finite_vector of length {spec.L} needs P*Q == L, got {P}*{Q}")
        return finite_zak(spec.values, ZakSplit(spec.L, P))
    vals = spec.values
    expected = (P, Q) if vals.ndim == 2 else (P, P, Q, Q)
    if vals.shape != expected:
        raise ZakError(f"explicit grid has shape {vals.shape}, requested {expected}")
    return ZakGrid(vals, split=split)


def rescale(spec: WindowSpec, alpha) -> WindowSpec:
    """Window ``alpha^{1/2} phi(alpha .)`` (per axis for d = 2)."""
    a = Fraction(alpha) if not isinstance(alpha, float) else Fraction(alpha).limit_denominator(10**9)
    if a <= 0:
        raise ZakError("alpha must be positive")
    if a == 1:
        return spec
    if spec.kind == "indicator":
        return WindowSpec("indicator", width=spec.width / a, d=spec.d)
    if spec.kind == "gaussian":
        return WindowSpec("gaussian", sigma=spec.sigma / float(a), d=spec.d)
    if spec.kind == "finite_vector":
        L = spec.L
        if a.denominator != 1 or L % a.numerator:
            raise ZakError(f"incompatible resampling: alpha={a} with L={L}")
        k = a.numerator
        v = spec.values[(k * np.arange(L)) % L]
        n_old = np.linalg.norm(spec.values)
        n_new = np.linalg.norm(v)
        v = v * (n_old / n_new) if n_new > 0 else v
        return WindowSpec("finite_vector", values=v, L=L)
    raise ZakError("incompatible resampling: explicit Zak grids cannot be dilated")


# -- export -------------------------------------------------------------------

def grid_to_csv(grid: ZakGrid) -> str:
    """Row-major CSV ``x,omega,re,im`` (model units, 17 significant digits)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    d = grid.d
    if d == 1:
        w.writerow(["x", "omega", "re", "im"])
    else:
        w.writerow(["x1", "x2", "omega1", "omega2", "re", "im"])
    res = grid.resolution
    for idx in np.ndindex(*res):
        coords = [f"{i / r:.17g}" for i, r in zip(idx, res)]
        v = grid.values[idx]
        w.writerow(coords + [f"{v.real:.17g}", f"{v.imag:.17g}"])
    return buf.getvalue()

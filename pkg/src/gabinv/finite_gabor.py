"""Gabor systems on C^L: shifts, spans, the Zak-domain bracket and projection."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from .lattice import (
    LatticeError,
    RationalLattice,
    adjoint,
    integer_lattice,
    join,
    quotient_cosets,
    scale_axes,
    sublattice_of,
    diagonal_lattice,
)
from .zak import DEFAULT_TAU, ZakGrid, ZakSplit, finite_zak, inverse_finite_zak, roll_abs

__all__ = [
    "FiniteGaborModel",
    "SubspaceBasis",
    "tf_shift",
    "gabor_matrix",
    "space_basis",
    "bracket",
    "project",
    "membership",
    "riesz_frame_bounds",
    "gram_projector",
    "basis_to_csv",
    "RANK_TOL",
]

RANK_TOL = 1e-10


def tf_shift(f, u: int, eta: int) -> np.ndarray:
    """``(pi(u, eta) f)(x) = exp(2 pi i eta x / L) f(x - u)``, indices mod L."""
    vec = np.asarray(f, dtype=complex)
    L = vec.shape[0]
    u, eta = int(u) % L, int(eta) % L
    phase = np.exp(2j * np.pi * ((eta * np.arange(L)) % L) / L)
    return phase * np.roll(vec, u)


@dataclass(frozen=True, eq=False)
class FiniteGaborModel:
    """``G(phi, Lambda_fin)`` inside ``C^L``.

    ``lattice`` is an integer lattice in sample units whose generators lie in
    ``N Z x M Z``; it is read modulo ``L``.  The matching model-unit lattice is
    ``diag(1/N, 1/M)`` applied to ``lattice + L Z^2``.
    """

    split: ZakSplit
    lattice: RationalLattice
    window: np.ndarray

    def __post_init__(self):
        if self.lattice.dim != 2:
            raise LatticeError("the finite model is one-dimensional (2x2 lattices)")
        if not self.lattice.is_integral:
            raise LatticeError("finite-model lattices must have integer entries")
        N, M = self.split.N, self.split.M
        if not sublattice_of(self.lattice, diagonal_lattice(N, M)):
            raise LatticeError(f"lattice {self.lattice.to_text()} is not inside {N}Z x {M}Z")
        w = np.array(self.window, dtype=complex)
        if w.shape != (self.split.L,):
            raise LatticeError(f"window length {w.shape} does not match L={self.split.L}")
        w.setflags(write=False)
        object.__setattr__(self, "window", w)

    @property
    def L(self) -> int:
        return self.split.L

    @cached_property
    def lifted(self) -> RationalLattice:
        L = self.split.L
        return join(self.lattice, [(L, 0), (0, L)])

    @cached_property
    def model_lattice(self) -> RationalLattice:
        return scale_axes(self.lifted, (Fraction(1, self.split.N), Fraction(1, self.split.M)))

    @cached_property
    def model_adjoint(self) -> RationalLattice:
        return adjoint(self.model_lattice)

    @cached_property
    def adjoint_fin(self) -> RationalLattice:
        """``{(x, w) : eta x = u w mod L for all (u, eta)}`` as a lattice in sample units."""
        return scale_axes(self.model_adjoint, (self.split.N, self.split.M))

    @cached_property
    def offsets(self) -> tuple[tuple[int, int], ...]:
        """Index-unit representatives of ``Lambda° / Z^2`` (one Zak-cell orbit)."""
        part = quotient_cosets(self.model_adjoint, integer_lattice(2))
        N, M = self.split.N, self.split.M
        return tuple((int(r[0] * N), int(r[1] * M)) for r in part.representatives)

    @property
    def m(self) -> int:
        return len(self.offsets)

    @cached_property
    def elements(self) -> tuple[tuple[int, int], ...]:
        """The distinct shifts ``(u, eta)`` of the induced subgroup of ``Z_L^2``."""
        L = self.split.L
        part = quotient_cosets(self.lifted, diagonal_lattice(L, L))
        return tuple((int(r[0]), int(r[1])) for r in part.representatives)

    @cached_property
    def zak_window(self) -> ZakGrid:
        return finite_zak(self.window, self.split)

    def with_window(self, window) -> "FiniteGaborModel":
        return FiniteGaborModel(self.split, self.lattice, window)


@dataclass(frozen=True, eq=False)
class SubspaceBasis:
    columns: np.ndarray
    rank: int
    tol: float

    def projector(self) -> np.ndarray:
        q = self.columns
        return q @ q.conj().T

    def residual(self, f) -> float:
        v = np.asarray(f, dtype=complex)
        q = self.columns
        return float(np.linalg.norm(v - q @ (q.conj().T @ v)))


def gabor_matrix(model: FiniteGaborModel) -> np.ndarray:
    cols = [tf_shift(model.window, u, eta) for u, eta in model.elements]
    return np.stack(cols, axis=1)


def space_basis(matrix, tol: float = RANK_TOL) -> SubspaceBasis:
    """Orthonormal basis of the column span via SVD thresholding at ``tol * s_max``."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    a = np.asarray(matrix, dtype=complex)
    if a.size == 0:
        return SubspaceBasis(np.zeros((a.shape[0], 0), dtype=complex), 0, tol)
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    smax = s[0] if s.size else 0.0
    rank = int(np.sum(s > tol * smax)) if smax > 0 else 0
    return SubspaceBasis(u[:, :rank].copy(), rank, tol)


def gram_projector(model: FiniteGaborModel, tol: float = RANK_TOL) -> np.ndarray:
    return space_basis(gabor_matrix(model), tol).projector()


def _check_split(model: FiniteGaborModel, f) -> np.ndarray:
    v = np.asarray(f, dtype=complex)
    if v.shape != (model.L,):
        raise ValueError(f"split mismatch: vector of shape {v.shape} for L={model.L}")
    return v


def bracket(f, g, model: FiniteGaborModel) -> ZakGrid:
    """``[f, g](n) = sum_r Zf(n + r) conj(Zg(n + r))`` over the orbit offsets ``r``.

    The product ``Zf conj(Zg)`` has no quasi-periodic phase, so wrapping the
    indices is exact.
    """
    zf = finite_zak(_check_split(model, f), model.split).values
    zg = finite_zak(_check_split(model, g), model.split).values
    prod = zf * np.conj(zg)
    out = np.zeros_like(prod)
    for r in model.offsets:
        out += roll_abs(prod, r)
    return ZakGrid(out, split=model.split, zero_tolerance=0.0)


def _support_threshold(model: FiniteGaborModel, tau: float) -> float:
    peak = float(np.max(np.abs(model.zak_window.values), initial=0.0))
    return (tau * peak) ** 2


def _multiplier(f, model: FiniteGaborModel, tau: float) -> np.ndarray:
    b_ff = bracket(model.window, model.window, model).values.real
    b_fp = bracket(f, model.window, model).values
    supp = b_ff > _support_threshold(model, tau)
    h = np.zeros_like(b_fp)
    h[supp] = b_fp[supp] / b_ff[supp]
    return h


def project(f, model: FiniteGaborModel, tau: float = DEFAULT_TAU) -> np.ndarray:
    """Orthogonal projection onto ``G(phi, Lambda)``: ``Z(Pf) = h_f Z phi``."""
    h = _multiplier(f, model, tau)
    return inverse_finite_zak(ZakGrid(h * model.zak_window.values, split=model.split))


def membership(f, model: FiniteGaborModel, tol: float = 1e-9, tau: float = DEFAULT_TAU):
    """``(True, h)`` when ``||f - Pf|| <= tol ||f||``, else ``(False, None)``."""
    v = _check_split(model, f)
    h = _multiplier(v, model, tau)
    pf = inverse_finite_zak(ZakGrid(h * model.zak_window.values, split=model.split))
    if np.linalg.norm(v - pf) <= tol * np.linalg.norm(v):
        return True, ZakGrid(h, split=model.split, zero_tolerance=0.0)
    return False, None


def riesz_frame_bounds(model: FiniteGaborModel, tau: float = DEFAULT_TAU) -> tuple[float, float, bool]:
    """``A = min [phi,phi] / m``, ``B = max [phi,phi] / m`` over the Zak cell."""
    b = bracket(model.window, model.window, model).values.real
    A = float(b.min()) / model.m
    B = float(b.max()) / model.m
    return A, B, A > _support_threshold(model, tau)


def basis_to_csv(basis: SubspaceBasis) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["row", "col", "re", "im"])
    for i, j in np.ndindex(*basis.columns.shape):
        v = basis.columns[i, j]
        w.writerow([i, j, f"{v.real:.17g}", f"{v.imag:.17g}"])
    return buf.getvalue()

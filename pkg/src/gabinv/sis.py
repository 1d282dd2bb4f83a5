"""Shift-invariant spaces on C^L, the Fourier-side counterpart of the Gabor tests.

``S(phi, p Z_L)`` is the span of the translates ``T_{kp} phi``.  On the DFT
side it is ``{m phi^ : m periodic with period L/p}``, so everything reduces to
the residue classes of frequencies modulo ``q = L/p``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .finite_gabor import RANK_TOL, space_basis
from .lattice import RationalLattice, diagonal_lattice, dual, scale_axes
from .zak import DEFAULT_TAU

__all__ = [
    "FiniteSISModel",
    "SISConditionResult",
    "dft",
    "sis_membership",
    "sis_condition_d",
    "sis_full_translation",
    "sis_brute_force",
    "sis_span_matrix",
]


def dft(f) -> np.ndarray:
    """Unitary DFT, ``f^(k) = L^{-1/2} sum_x f(x) e^{-2 pi i x k / L}``."""
    return np.fft.fft(np.asarray(f, dtype=complex), norm="ortho")


@dataclass(frozen=True, eq=False)
class FiniteSISModel:
    L: int
    p: int
    window: np.ndarray

    def __post_init__(self):
        if self.L < 1 or self.p < 1 or self.L % self.p:
            raise ValueError(f"p={self.p} must divide L={self.L}")
        w = np.array(self.window, dtype=complex)
        if w.shape != (self.L,):
            raise ValueError("window length must equal L")
        w.setflags(write=False)
        object.__setattr__(self, "window", w)

    @property
    def q(self) -> int:
        return self.L // self.p

    @cached_property
    def annihilator(self) -> RationalLattice:
        """``Gamma*`` in bins: ``L * (p Z)* = (L/p) Z``."""
        return scale_axes(dual(diagonal_lattice(self.p)), (self.L,))

    @cached_property
    def window_hat(self) -> np.ndarray:
        return dft(self.window)


def sis_span_matrix(model: FiniteSISModel, step: int | None = None) -> np.ndarray:
    step = model.p if step is None else step
    return np.stack([np.roll(model.window, k * step) for k in range(model.L // np.gcd(step, model.L))], axis=1)


def sis_membership(f, model: FiniteSISModel, tol: float = 1e-9, tau: float = DEFAULT_TAU):
    """``(True, m)`` when ``f^ = m phi^`` with ``m`` of period ``q``; ``(False, None)`` otherwise.

    ``m`` is the per-class least-squares fit, set to 0 on classes where
    ``phi^`` vanishes.
    """
    fh = dft(f)
    ph = model.window_hat
    q = model.q
    num = (fh * np.conj(ph)).reshape(model.p, q).sum(axis=0)
    den = (np.abs(ph) ** 2).reshape(model.p, q).sum(axis=0)
    thr = (tau * float(np.max(np.abs(ph), initial=0.0))) ** 2
    m_cls = np.where(den > thr, num / np.where(den > thr, den, 1.0), 0.0)
    m = np.tile(m_cls, model.p)
    resid = np.linalg.norm(fh - m * ph)
    if resid <= tol * np.linalg.norm(fh):
        return True, m
    return False, None


@dataclass(frozen=True)
class SISConditionResult:
    holds: bool
    witnesses: tuple[tuple[int, int], ...]
    max_active: int

    def __bool__(self) -> bool:
        return self.holds


def sis_condition_d(phi_hat, p: int, p_tilde: int, tau: float = DEFAULT_TAU) -> SISConditionResult:
    """Extra invariance of ``S(phi, pZ_L)`` under ``T_{p_tilde}``, read from ``phi^``.

    ``phi^(k) != 0`` must force ``phi^(k + r) = 0`` for every ``r`` in
    ``Gamma* \\ Gamma~*`` where ``Gamma* = (L/p) Z_L`` and
    ``Gamma~* = (L/p_tilde) Z_L``.  The coset-energy form is evaluated too and
    must agree.
    """
    ph = np.asarray(phi_hat, dtype=complex)
    L = ph.shape[0]
    if L % p or p % p_tilde:
        raise ValueError(f"resolution mismatch: need p_tilde | p | L, got {p_tilde}, {p}, {L}")
    q, qt = L // p, L // p_tilde
    a = np.abs(ph)
    eps = tau * float(np.max(a, initial=0.0))
    nz = a > eps
    witnesses = []
    for j in range(1, p):
        r = j * q
        if r % qt == 0:
            continue
        bad = nz & np.roll(nz, -r)
        witnesses.extend((int(k), r) for k in np.nonzero(bad)[0])
    witnesses.sort()
    # coset energies: Gamma*/Gamma~* has p/p_tilde classes j mod (p/p_tilde)
    n_cos = p // p_tilde
    energy = np.zeros((n_cos, L))
    for j in range(p):
        energy[j % n_cos] += np.roll(a**2, -j * q)
    active = (energy > eps**2).sum(axis=0)
    max_active = int(active.max()) if L else 0
    holds = not witnesses
    if holds != (max_active <= 1):
        raise RuntimeError("pointwise and coset-energy forms disagree at the threshold")
    return SISConditionResult(holds, tuple(witnesses), max_active)


def sis_full_translation(phi_hat, p: int, tau: float = DEFAULT_TAU) -> bool:
    """Invariance of ``S(phi, pZ_L)`` under every translation: one nonzero per class mod ``L/p``."""
    return sis_condition_d(phi_hat, p, 1, tau).holds


def sis_brute_force(model: FiniteSISModel, p_tilde: int, tol: float = 1e-9) -> bool:
    """Span oracle: ``T_{p_tilde} v`` stays in ``S(phi, pZ_L)`` for every basis vector ``v``."""
    q = space_basis(sis_span_matrix(model), RANK_TOL).columns
    if q.shape[1] == 0:
        return True
    moved = np.roll(q, p_tilde, axis=0)
    resid = moved - q @ (q.conj().T @ moved)
    return bool(np.max(np.linalg.norm(resid, axis=0)) <= tol)

"""Extra time-frequency invariance of Gabor spaces.

Lattices passed to this module are in model units: ``Lambda`` and
``Lambda~`` satisfy ``Lambda <= Lambda~ <= Z^{2d}`` and Zak grids sample the
unit cell at ``(i/P, j/Q)``.  A finite model at split ``(N, M)`` is the grid
``P = N``, ``Q = M``; use :func:`model_for` to build one from model-unit data.
"""

from __future__ import annotations

import dataclasses
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .finite_gabor import (
    FiniteGaborModel,
    RANK_TOL,
    gabor_matrix,
    membership,
    space_basis,
    tf_shift,
)
from .lattice import (
    CosetPartition,
    FundamentalDomain,
    LatticeError,
    RationalLattice,
    adjoint,
    coset_character,
    format_rational,
    fundamental_domain,
    grid_refines,
    index,
    integer_lattice,
    intermediate_lattices,
    join,
    quotient_cosets,
    scale_axes,
    sublattice_of,
)
from .zak import DEFAULT_TAU, ZakGrid, ZakSplit, finite_zak, inverse_finite_zak, roll_abs, zak_shift_image

__all__ = [
    "InvarianceError",
    "NotInvariantError",
    "OracleMismatchError",
    "ConditionInconsistencyError",
    "Witness",
    "InvarianceReport",
    "MaskFamily",
    "Geometry",
    "DecompositionResult",
    "IntegerInvarianceResult",
    "FullShiftResult",
    "InvarianceSetResult",
    "geometry",
    "build_masks",
    "condition_d",
    "decompose",
    "multiplier_coset",
    "multiplier_from_pattern",
    "certify_multiplier",
    "brute_force_invariant",
    "brute_force_lattice",
    "integer_invariance",
    "full_shift_invariance",
    "invariance_set",
    "check",
    "model_for",
    "sample_generators",
    "riesz_bounds_for",
]


class InvarianceError(ValueError):
    pass


class NotInvariantError(InvarianceError):
    def __init__(self, msg: str = "not invariant; no multiplier exists"):
        super().__init__(msg)


class OracleMismatchError(RuntimeError):
    """Zak-domain verdict and the brute-force span test disagree."""


class ConditionInconsistencyError(RuntimeError):
    """The pointwise form and the coset-energy form of condition (d) disagree."""


# -- geometry -----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class MaskFamily:
    """Masks ``B^(l)`` on the Zak grid, one boolean array per coset."""

    cosets: CosetPartition
    domain: FundamentalDomain
    masks: np.ndarray  # shape (N, *resolution)
    resolution: tuple[int, ...]

    @property
    def label_grid(self) -> np.ndarray:
        return np.argmax(self.masks, axis=0)

    def __len__(self) -> int:
        return self.masks.shape[0]


def _grid_points(resolution: Sequence[int]):
    for idx in itertools.product(*(range(r) for r in resolution)):
        yield idx, tuple(Fraction(i, r) for i, r in zip(idx, resolution))


def build_masks(cosets: CosetPartition, domain: FundamentalDomain, resolution: Sequence[int]) -> MaskFamily:
    """``B^(l) = union of (u, eta) + D over (u, eta) in I^(l)``, sampled on the grid.

    Every node ``p`` is written as ``p = r + d`` with ``d`` a node of ``D`` and
    ``r`` in the superlattice; the node goes to the mask of ``r``'s coset.
    """
    res = tuple(int(r) for r in resolution)
    sup = cosets.superlattice
    if domain.lattice != sup:
        raise LatticeError("the fundamental domain must belong to the coset superlattice")
    if len(res) != sup.dim or not grid_refines(sup, res):
        raise LatticeError(f"resolution {res} is incompatible with {sup.to_text()}")
    rep_of: dict = {}
    for _, p in _grid_points(res):
        if domain.contains(p):
            key = sup.reduce(p)
            if key in rep_of:
                raise LatticeError("domain holds two congruent grid nodes")
            rep_of[key] = p
    expected = Fraction(int(np.prod(res))) * sup.covolume
    if len(rep_of) != expected:
        raise LatticeError("domain does not tile the grid (resolution incompatible)")
    masks = np.zeros((cosets.order,) + res, dtype=bool)
    for idx, p in _grid_points(res):
        d = rep_of[sup.reduce(p)]
        r = tuple(a - b for a, b in zip(p, d))
        masks[(cosets.label(r),) + idx] = True
    return MaskFamily(cosets, domain, masks, res)


@dataclass(frozen=True, eq=False)
class Geometry:
    """Everything condition (d) needs about a lattice pair at one resolution."""

    lam: RationalLattice
    tilde: RationalLattice
    resolution: tuple[int, ...]
    lam_adj: RationalLattice
    tilde_adj: RationalLattice
    cosets: CosetPartition
    masks: MaskFamily
    offsets: tuple[tuple[int, ...], ...]
    offset_points: tuple[tuple[Fraction, ...], ...]
    offset_labels: tuple[int, ...]
    domain_nodes: np.ndarray

    @property
    def N(self) -> int:
        return self.cosets.order

    @property
    def m(self) -> int:
        return len(self.offsets)


@lru_cache(maxsize=512)
def geometry(lam: RationalLattice, tilde: RationalLattice, resolution: tuple[int, ...]) -> Geometry:
    res = tuple(int(r) for r in resolution)
    dim = lam.dim
    if dim % 2 or tilde.dim != dim:
        raise LatticeError("lattice pair must live in an even dimension 2d")
    if len(res) != dim:
        raise LatticeError(f"grid has {len(res)} axes, lattices have dimension {dim}")
    zd = integer_lattice(dim)
    if not (sublattice_of(lam, tilde) and sublattice_of(tilde, zd)):
        raise LatticeError("lattice chain violated: need Lambda <= Lambda~ <= Z^{2d}")
    lam_adj = adjoint(lam)
    tilde_adj = adjoint(tilde)
    if not grid_refines(lam_adj, res):
        raise LatticeError(f"grid {res} too coarse for the adjoint lattice {lam_adj.to_text()}")
    cosets = quotient_cosets(lam_adj, tilde_adj)
    dom = fundamental_domain(lam_adj, res)
    masks = build_masks(cosets, dom, res)
    orbit = quotient_cosets(lam_adj, zd).representatives
    offsets = tuple(tuple(int(x * r) for x, r in zip(p, res)) for p in orbit)
    labels = tuple(cosets.label(p) for p in orbit)
    dnodes = dom.node_mask(res)
    return Geometry(lam, tilde, res, lam_adj, tilde_adj, cosets, masks, offsets, tuple(orbit), labels, dnodes)


# -- condition (d) ------------------------------------------------------------

@dataclass(frozen=True)
class Witness:
    node: tuple[Fraction, ...]
    offset: tuple[Fraction, ...]
    magnitudes: tuple[float, float]

    def to_json(self) -> dict:
        return {
            "node": [format_rational(x) for x in self.node],
            "offset": [format_rational(x) for x in self.offset],
            "magnitudes": [float(self.magnitudes[0]), float(self.magnitudes[1])],
        }


@dataclass(frozen=True, eq=False)
class InvarianceReport:
    lam: RationalLattice
    tilde: RationalLattice
    N: int
    condition_d: bool
    witnesses: tuple[Witness, ...]
    max_active_cosets: int
    energies: np.ndarray = field(repr=False)
    resolution: dict = field(default_factory=dict)
    tau: float = DEFAULT_TAU
    oracle: bool | None = None
    decomposition: dict | None = None

    def __post_init__(self):
        if self.condition_d != (len(self.witnesses) == 0):
            raise ConditionInconsistencyError("condition_d must hold exactly when there are no witnesses")

    def with_oracle(self, oracle: bool) -> "InvarianceReport":
        rep = dataclasses.replace(self, oracle=bool(oracle))
        rep.raise_on_mismatch()
        return rep

    def raise_on_mismatch(self) -> None:
        if self.oracle is not None and self.oracle != self.condition_d:
            raise OracleMismatchError(
                f"condition (d) = {self.condition_d} but the brute-force oracle says {self.oracle} "
                f"for Lambda={self.lam.to_text()}, Lambda~={self.tilde.to_text()}"
            )

    def to_json(self, max_witnesses: int | None = None) -> dict:
        wit = self.witnesses if max_witnesses is None else self.witnesses[:max_witnesses]
        out = {
            "lambda": self.lam.to_text(),
            "lambda_tilde": self.tilde.to_text(),
            "N": self.N,
            "condition_d": self.condition_d,
            "witnesses": [w.to_json() for w in wit],
            "witness_count": len(self.witnesses),
            "coset_energies": {"max_active": self.max_active_cosets},
            "oracle": self.oracle,
            "resolution": dict(self.resolution),
            "tau": self.tau,
        }
        if self.decomposition is not None:
            out["decomposition"] = self.decomposition
        return out


def _resolution_info(grid: ZakGrid) -> dict:
    info = {"mode": grid.mode, "grid": list(grid.resolution)}
    if grid.split is not None:
        info.update({"L": grid.split.L, "N": grid.split.N, "M": grid.split.M})
    return info


def _node_point(idx, res) -> tuple[Fraction, ...]:
    return tuple(Fraction(int(i), r) for i, r in zip(idx, res))


def _coset_energies(absval: np.ndarray, geo: Geometry) -> np.ndarray:
    sq = absval**2
    energies = np.zeros((geo.N,) + sq.shape)
    for r, lab in zip(geo.offsets, geo.offset_labels):
        energies[lab] += roll_abs(sq, r)
    return energies


def condition_d(zgrid: ZakGrid, lam: RationalLattice, tilde: RationalLattice, tau: float | None = None) -> InvarianceReport:
    """Zero-pattern test: wherever ``Z phi`` is nonzero it vanishes on ``Lambda° \\ Lambda~°`` translates.

    Both forms are evaluated: the pointwise implication (which yields the
    witnesses) and "at most one coset energy is nonzero".  Disagreement raises
    :class:`ConditionInconsistencyError`.  ``tau`` is relative to ``max|Z phi|``.
    """
    res = zgrid.resolution
    geo = geometry(lam, tilde, tuple(res))
    absval = np.abs(zgrid.values)
    eps = zgrid.threshold(tau)
    nz = absval > eps
    witnesses = []
    for r, point, lab in zip(geo.offsets, geo.offset_points, geo.offset_labels):
        if lab == 0:
            continue
        moved = roll_abs(absval, r)
        bad = nz & (moved > eps)
        for idx in zip(*np.nonzero(bad)):
            witnesses.append((idx, r, Witness(_node_point(idx, res), point, (float(absval[idx]), float(moved[idx])))))
    witnesses.sort(key=lambda t: (t[0], t[1]))
    energies = _coset_energies(absval, geo)
    active = (energies > eps**2).sum(axis=0)
    max_active = int(active.max()) if active.size else 0
    form1 = not witnesses
    form2 = max_active <= 1
    if form1 != form2:
        raise ConditionInconsistencyError(
            f"pointwise form says {form1}, coset-energy form says {form2}; values sit at the threshold"
        )
    return InvarianceReport(
        lam=lam,
        tilde=tilde,
        N=geo.N,
        condition_d=form1,
        witnesses=tuple(w for _, _, w in witnesses),
        max_active_cosets=max_active,
        energies=energies,
        resolution=_resolution_info(zgrid),
        tau=DEFAULT_TAU if tau is None else float(tau),
    )


# -- finite-model glue --------------------------------------------------------

def model_for(split: ZakSplit, lam: RationalLattice, window) -> FiniteGaborModel:
    """Finite model whose model-unit lattice is ``lam`` (sample lattice ``diag(N, M) lam``)."""
    if lam.dim != 2:
        raise LatticeError("the finite model needs a 2x2 lattice")
    model = FiniteGaborModel(split, scale_axes(lam, (split.N, split.M)), window)
    if model.model_lattice != lam:
        raise LatticeError(
            f"lattice {lam.to_text()} must contain {split.M}Z x {split.N}Z to be represented mod L={split.L}"
        )
    return model


def _sample_shift(split: ZakSplit, ab: Sequence) -> tuple[int, int]:
    a, b = (Fraction(x) for x in ab)
    u, eta = a * split.N, b * split.M
    if u.denominator != 1 or eta.denominator != 1:
        raise LatticeError("shift is not on the sample grid")
    return int(u), int(eta)


def brute_force_invariant(model: FiniteGaborModel, ab: Sequence[int], tol: float = 1e-9) -> bool:
    """Span test in samples: every basis vector ``v`` has ``||(I - P) pi(a,b) v|| <= tol``."""
    a, b = int(ab[0]), int(ab[1])
    if Fraction(ab[0]).denominator != 1 or Fraction(ab[1]).denominator != 1:
        raise LatticeError("shift must be integral in samples")
    basis = space_basis(gabor_matrix(model), RANK_TOL)
    return _invariant_under(basis.columns, a, b, tol)


def _invariant_under(q: np.ndarray, a: int, b: int, tol: float) -> bool:
    if q.shape[1] == 0:
        return True
    moved = np.stack([tf_shift(q[:, k], a, b) for k in range(q.shape[1])], axis=1)
    resid = moved - q @ (q.conj().T @ moved)
    return bool(np.max(np.linalg.norm(resid, axis=0)) <= tol)


def brute_force_lattice(model: FiniteGaborModel, tilde: RationalLattice, tol: float = 1e-9) -> bool:
    """Oracle for ``Lambda~``-invariance, checked on the canonical generators of ``Lambda~``."""
    basis = space_basis(gabor_matrix(model), RANK_TOL)
    for col in tilde.columns:
        u, eta = _sample_shift(model.split, col)
        if not _invariant_under(basis.columns, u, eta, tol):
            return False
    return True


def check(model: FiniteGaborModel, tilde: RationalLattice, tau: float | None = None, oracle: bool = True,
          tol: float = 1e-9) -> InvarianceReport:
    """Condition (d) on the model's Zak grid, optionally cross-checked by the oracle."""
    rep = condition_d(model.zak_window, model.model_lattice, tilde, tau)
    if oracle:
        rep = rep.with_oracle(brute_force_lattice(model, tilde, tol))
    return rep


# -- decomposition ------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DecompositionResult:
    components: np.ndarray  # (N, L)
    norms: tuple[float, ...]
    parseval_error: float
    max_cross: float
    condition_d: bool
    memberships: tuple[bool, ...] | None

    @property
    def flagged(self) -> bool:
        """True when condition (d) fails, so membership of the parts is not claimed."""
        return not self.condition_d

    def to_json(self) -> dict:
        return {
            "norms": list(self.norms),
            "parseval_error": self.parseval_error,
            "max_cross": self.max_cross,
            "condition_d": self.condition_d,
            "memberships": None if self.memberships is None else list(self.memberships),
            "flagged": self.flagged,
        }


def decompose(f, model: FiniteGaborModel, tilde: RationalLattice, tau: float | None = None,
              tol: float = 1e-9) -> DecompositionResult:
    """``f^(l) = Z^{-1}(Zf chi_{B^(l)})`` for every coset ``l``.

    ``f`` may be a vector of length ``L`` or a finite-mode Zak grid.
    """
    if isinstance(f, ZakGrid):
        zf = f
        vec = inverse_finite_zak(f)
    else:
        vec = np.asarray(f, dtype=complex)
        zf = finite_zak(vec, model.split)
    geo = geometry(model.model_lattice, tilde, model.split.resolution)
    comps = np.stack([inverse_finite_zak(ZakGrid(zf.values * mk, split=model.split)) for mk in geo.masks.masks])
    norms = tuple(float(np.linalg.norm(c)) for c in comps)
    parseval = abs(sum(n**2 for n in norms) - float(np.linalg.norm(vec)) ** 2)
    cross = 0.0
    for i, j in itertools.combinations(range(len(comps)), 2):
        cross = max(cross, abs(np.vdot(comps[i], comps[j])))
    holds = condition_d(model.zak_window, model.model_lattice, tilde, tau).condition_d
    members = None
    if holds:
        # parts below tol * ||f|| are numerically the zero vector, which every subspace holds
        floor = tol * float(np.linalg.norm(vec))
        members = tuple(bool(n <= floor or membership(c, model, tol=tol)[0]) for c, n in zip(comps, norms))
    return DecompositionResult(comps, norms, parseval, float(cross), holds, members)


# -- multipliers --------------------------------------------------------------

def _check_in_tilde(tilde: RationalLattice, ab) -> tuple[Fraction, ...]:
    vec = tuple(Fraction(x) for x in ab)
    if len(vec) != tilde.dim or vec not in tilde:
        raise LatticeError(f"{tuple(map(format_rational, vec))} is not in Lambda~ = {tilde.to_text()}")
    return vec


def _plane_phase(resolution: Sequence[int], ab: Sequence[Fraction], shift: Sequence[Fraction] | None = None) -> np.ndarray:
    """``exp(2 pi i (b.x - a.w))`` on the grid, optionally at ``node + shift``."""
    dim = len(resolution)
    d = dim // 2
    nodes = np.indices(resolution).astype(float)
    turns = np.zeros(tuple(resolution))
    shift = shift or (Fraction(0),) * dim
    for t in range(d):
        a, b = ab[t], ab[d + t]
        x = nodes[t] / resolution[t] + float(shift[t])
        w = nodes[d + t] / resolution[d + t] + float(shift[d + t])
        turns = turns + float(b) * x - float(a) * w
    return np.exp(2j * np.pi * np.mod(turns, 1.0))


def multiplier_coset(cosets: CosetPartition, masks: MaskFamily, ell: int, ab, split: ZakSplit | None = None) -> ZakGrid:
    """``h^(l)_{a,b}(n) = (1/M') sum_r e^{2 pi i [b.(x+u) - a.(w+eta)]} chi_{B^(l)}(n + r)``.

    The sum runs over ``r = (u, eta)`` in ``Lambda° cap [0,1)^{2d}`` and
    ``M' = |Lambda~° cap [0,1)^{2d}|``.  No extra per-coset phase is applied:
    with it the identity ``h chi_B = e^{2 pi i (b.x - a.w)} chi_B`` fails.
    """
    tilde = adjoint(cosets.sublattice)
    vec = _check_in_tilde(tilde, ab)
    if not 0 <= ell < cosets.order:
        raise LatticeError(f"coset index {ell} out of range")
    res = masks.resolution
    dim = len(res)
    zd = integer_lattice(dim)
    orbit = quotient_cosets(cosets.superlattice, zd).representatives
    m_prime = index(zd, cosets.sublattice)
    chi = masks.masks[ell]
    h = np.zeros(res, dtype=complex)
    for r in orbit:
        shift = tuple(int(x * n) for x, n in zip(r, res))
        h += _plane_phase(res, vec, r) * roll_abs(chi, shift)
    return ZakGrid(h / m_prime, split=split, zero_tolerance=0.0)


def certify_multiplier(zgrid: ZakGrid, h: ZakGrid, ab) -> float:
    """``max |Z[pi(a,b) phi] - h Z phi|`` over the grid."""
    if zgrid.mode == "finite":
        split = zgrid.split
        u, eta = _sample_shift(split, ab)
        target = finite_zak(tf_shift(inverse_finite_zak(zgrid), u, eta), split).values
    else:
        target = zak_shift_image(zgrid, ab).values
    return float(np.max(np.abs(target - h.values * zgrid.values), initial=0.0))


def multiplier_from_pattern(zgrid: ZakGrid, lam: RationalLattice, tilde: RationalLattice, ab,
                            tau: float | None = None, certify_tol: float = 1e-10) -> ZakGrid:
    """A ``Lambda°``-periodic ``h`` with ``Z[pi(a,b) phi] = h Z phi``.

    On each node of the fundamental domain the unique coset ``l0`` carrying
    energy fixes ``h = chi_{l0}(a,b) e^{2 pi i (b.x - a.w)}``; dead orbits get
    0.  The result is certified against the shifted window.
    """
    vec = _check_in_tilde(tilde, ab)
    rep = condition_d(zgrid, lam, tilde, tau)
    if not rep.condition_d:
        raise NotInvariantError()
    geo = geometry(lam, tilde, tuple(zgrid.resolution))
    eps2 = zgrid.threshold(tau) ** 2
    res = zgrid.resolution
    base_phase = _plane_phase(res, vec)
    chars = [coset_character(geo.cosets, ell, vec) for ell in range(geo.N)]
    h = np.zeros(res, dtype=complex)
    for idx in zip(*np.nonzero(geo.domain_nodes)):
        e = rep.energies[(slice(None),) + idx]
        live = np.nonzero(e > eps2)[0]
        if live.size == 0:
            continue
        if live.size > 1:  # pragma: no cover - excluded by condition (d)
            raise NotInvariantError()
        value = chars[int(live[0])] * base_phase[idx]
        for r in geo.offsets:
            h[tuple((i + s) % n for i, s, n in zip(idx, r, res))] = value
    out = ZakGrid(h, split=zgrid.split, zero_tolerance=0.0)
    resid = certify_multiplier(zgrid, out, vec)
    if resid > certify_tol * max(1.0, float(np.max(np.abs(zgrid.values), initial=0.0))):
        raise InvarianceError(f"multiplier certificate failed: residual {resid:.3e}")
    return out


# -- extreme cases ------------------------------------------------------------

@dataclass(frozen=True)
class IntegerInvarianceResult:
    invariant: bool
    domain: tuple[tuple[Fraction, ...], ...]
    witness: tuple[tuple[Fraction, ...], tuple[Fraction, ...]] | None

    def __bool__(self) -> bool:
        return self.invariant


def integer_invariance(zgrid: ZakGrid, lam: RationalLattice, tau: float | None = None,
                       require_riesz: bool = False) -> IntegerInvarianceResult:
    """``Z^{2d}``-invariance: at most one nonzero node per ``Lambda°``-orbit.

    With ``require_riesz`` every orbit must carry exactly one.  Returns the
    selected nodes as a certifying domain, or two nodes of one orbit (or an
    empty orbit) as the witness.
    """
    res = tuple(zgrid.resolution)
    geo = geometry(lam, integer_lattice(lam.dim), res)
    nz = zgrid.nonzero(tau)
    chosen = []
    for idx in zip(*np.nonzero(geo.domain_nodes)):
        hits = []
        for r in geo.offsets:
            tgt = tuple((i + s) % n for i, s, n in zip(idx, r, res))
            if nz[tgt]:
                hits.append(tgt)
        if len(hits) > 1:
            return IntegerInvarianceResult(False, (), (_node_point(hits[0], res), _node_point(hits[1], res)))
        if require_riesz and not hits:
            p = _node_point(idx, res)
            return IntegerInvarianceResult(False, (), (p, p))
        chosen.extend(hits)
    return IntegerInvarianceResult(True, tuple(sorted(_node_point(c, res) for c in chosen)), None)


@dataclass(frozen=True)
class FullShiftResult:
    invariant: bool
    mode: str
    E: tuple[int, ...] | None
    witness: int | None

    def __bool__(self) -> bool:
        return self.invariant


def full_shift_invariance(zgrid: ZakGrid, mode: str, tau: float | None = None) -> FullShiftResult:
    """Pattern tests for invariance under all translations, modulations, or both.

    ``translation``: every frequency row is all-zero or all-nonzero, and ``E``
    is the list of nonzero frequency indices.  ``modulation``: the same on
    time columns.  ``all``: the whole pattern is constant.
    """
    if mode not in ("translation", "modulation", "all"):
        raise InvarianceError(f"invalid mode {mode!r}")
    tsize = int(np.prod(zgrid.time_res))
    fsize = int(np.prod(zgrid.freq_res))
    nz = zgrid.nonzero(tau).reshape(tsize, fsize)
    if mode == "all":
        ok = bool(nz.all() or not nz.any())
        return FullShiftResult(ok, mode, None, None if ok else 0)
    lines = nz.T if mode == "translation" else nz
    for k, line in enumerate(lines):
        if line.any() and not line.all():
            return FullShiftResult(False, mode, None, k)
    E = tuple(int(k) for k, line in enumerate(lines) if line.all())
    return FullShiftResult(True, mode, E, None)


# -- invariance sets ----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class InvarianceSetResult:
    maximal: RationalLattice
    table: tuple[dict, ...]

    def to_json(self) -> dict:
        return {"maximal": self.maximal.to_text(), "rows": list(self.table)}


def invariance_set(zgrid: ZakGrid, lam: RationalLattice, ambient: RationalLattice | None = None,
                   tau: float | None = None, model: FiniteGaborModel | None = None,
                   tol: float = 1e-9) -> InvarianceSetResult:
    """Largest lattice ``Lambda^`` with ``Lambda <= Lambda^ <= ambient`` leaving the space invariant.

    Every intermediate lattice is tested; the join of the invariant ones is
    re-tested (the invariance set is a group, so it must pass).  With a
    finite ``model`` the oracle runs alongside and must agree.
    """
    ambient = integer_lattice(lam.dim) if ambient is None else ambient
    rows = []
    good = []
    for tilde in intermediate_lattices(lam, ambient):
        rep = condition_d(zgrid, lam, tilde, tau)
        if model is not None:
            rep = rep.with_oracle(brute_force_lattice(model, tilde, tol))
        rows.append({
            "lambda_tilde": tilde.to_text(),
            "index": index(lam, tilde),
            "N": rep.N,
            "condition_d": rep.condition_d,
            "oracle": rep.oracle,
        })
        if rep.condition_d:
            good.append(tilde)
    top = join(lam, [c for t in good for c in t.columns])
    final = condition_d(zgrid, lam, top, tau)
    if not final.condition_d:
        raise ConditionInconsistencyError(f"join {top.to_text()} of invariant lattices failed re-verification")
    if model is not None:
        final.with_oracle(brute_force_lattice(model, top, tol))
    return InvarianceSetResult(top, tuple(rows))


def sample_generators(tilde: RationalLattice, count: int, rng: np.random.Generator, box: int = 6) -> list[tuple[int, ...]]:
    """``count`` pseudo-random points of ``Lambda~`` (integer combinations of its basis)."""
    out = []
    for _ in range(count):
        coeffs = rng.integers(-box, box + 1, size=tilde.dim)
        out.append(tuple(int(x) for x in tilde.point(coeffs)))
    return out


def riesz_bounds_for(zgrid: ZakGrid, lam: RationalLattice) -> tuple[float, float]:
    """``min / max`` of the orbit sums ``sum_r |Z phi(n + r)|^2`` divided by ``m``."""
    geo = geometry(lam, lam, tuple(zgrid.resolution))
    total = _coset_energies(np.abs(zgrid.values), geo).sum(axis=0)
    return float(total.min()) / geo.m, float(total.max()) / geo.m


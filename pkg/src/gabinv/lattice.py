"""Exact rational lattices: Hermite normal form, duals, adjoints, quotients.

Every lattice is stored by its column Hermite normal form (lower triangular,
positive diagonal, off-diagonal entries of row ``i`` reduced into
``[0, h_ii)``), so equality of :class:`RationalLattice` values is equality of
point sets.  All arithmetic is done with :class:`fractions.Fraction`.

Vectors in time-frequency lattices are ordered ``(u_1..u_d, eta_1..eta_d)``.
"""

from __future__ import annotations

import cmath
import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache, reduce
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "LatticeError",
    "DegenerateLatticeError",
    "IndexGuardError",
    "RationalLattice",
    "CosetPartition",
    "FundamentalDomain",
    "canonical_basis",
    "member",
    "sublattice_of",
    "dual",
    "adjoint",
    "adjoint_formula",
    "join",
    "index",
    "quotient_cosets",
    "coset_character",
    "fundamental_domain",
    "intermediate_lattices",
    "integer_lattice",
    "diagonal_lattice",
    "separable_lattice",
    "scale_axes",
    "parse_lattice",
    "format_matrix",
    "format_rational",
    "ENUMERATION_GUARD",
    "grid_refines",
    "minimal_resolution",
    "parse_matrix",
]

ENUMERATION_GUARD = 10_000

Matrix = tuple[tuple[Fraction, ...], ...]
Vector = tuple[Fraction, ...]


class LatticeError(ValueError):
    """Invalid lattice input or violated lattice precondition."""


class DegenerateLatticeError(LatticeError):
    def __init__(self, msg: str = "degenerate lattice"):
        super().__init__(msg)


class IndexGuardError(LatticeError):
    """Raised when a quotient is too large to enumerate."""


# -- small exact linear algebra ---------------------------------------------

def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, (float, np.floating)):
        if not math.isfinite(x):
            raise LatticeError(f"non-finite entry {x!r}")
        return Fraction(x).limit_denominator(10**12)
    raise LatticeError(f"cannot interpret {x!r} as a rational number")


def _as_matrix(raw) -> Matrix:
    rows = [tuple(_frac(v) for v in row) for row in raw]
    if not rows or any(len(r) != len(rows) for r in rows):
        raise LatticeError("basis must be a non-empty square matrix")
    return tuple(rows)


def _as_vector(v, dim: int | None = None) -> Vector:
    vec = tuple(_frac(x) for x in v)
    if dim is not None and len(vec) != dim:
        raise LatticeError(f"dimension mismatch: expected {dim}, got {len(vec)}")
    return vec


def _transpose(m: Matrix) -> Matrix:
    return tuple(zip(*m))


def _matmul(a: Matrix, b: Matrix) -> Matrix:
    bt = _transpose(b)
    return tuple(tuple(sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt) for row in a)


def _matvec(a: Matrix, v: Sequence[Fraction]) -> Vector:
    return tuple(sum((x * y for x, y in zip(row, v)), Fraction(0)) for row in a)


def _inverse(m: Matrix) -> Matrix:
    n = len(m)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            raise DegenerateLatticeError()
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [x / p for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return tuple(tuple(row[n:]) for row in aug)


def _det(m: Matrix) -> Fraction:
    n = len(m)
    a = [list(r) for r in m]
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det *= a[col][col]
        for r in range(col + 1, n):
            f = a[r][col] / a[col][col]
            if f:
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return det


def _egcd(a: int, b: int) -> tuple[int, int, int]:
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def _hnf_int_columns(columns: Iterable[Sequence[int]], n: int) -> list[list[int]]:
    """Lower-triangular column HNF of the lattice spanned by integer columns."""
    cols = [list(c) for c in columns if any(c)]
    pivots: list[list[int]] = []
    for i in range(n):
        active = [c for c in cols if c[i] != 0]
        rest = [c for c in cols if c[i] == 0]
        if not active:
            raise DegenerateLatticeError()
        piv = active[0]
        for c in active[1:]:
            a, b = piv[i], c[i]
            g, s, t = _egcd(a, b)
            new_piv = [s * x + t * y for x, y in zip(piv, c)]
            other = [(a // g) * y - (b // g) * x for x, y in zip(piv, c)]
            piv = new_piv
            if any(other):
                rest.append(other)
        if piv[i] < 0:
            piv = [-x for x in piv]
        for j, pc in enumerate(pivots):
            q = pc[i] // piv[i]
            if q:
                pivots[j] = [x - q * y for x, y in zip(pc, piv)]
        pivots.append(piv)
        cols = [c for c in rest if any(c)]
    return pivots


def _common_denominator(values: Iterable[Fraction]) -> int:
    return reduce(math.lcm, (v.denominator for v in values), 1)


def _hnf(columns: Sequence[Sequence[Fraction]], n: int) -> Matrix:
    den = _common_denominator(x for c in columns for x in c)
    int_cols = [[int(x * den) for x in c] for c in columns]
    piv = _hnf_int_columns(int_cols, n)
    # piv is a list of columns; store row-major
    return tuple(tuple(Fraction(piv[j][i], den) for j in range(n)) for i in range(n))


# -- lattice text format -----------------------------------------------------

def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def format_matrix(m: Sequence[Sequence[Fraction]]) -> str:
    return ";".join(",".join(format_rational(v) for v in row) for row in m)


def parse_lattice(text: str) -> "RationalLattice":
    """Parse ``"4,0;0,2"`` (row-major, ';' between rows) into a lattice."""
    return RationalLattice(parse_matrix(text))


def parse_matrix(text: str) -> Matrix:
    if not isinstance(text, str) or not text.strip():
        raise LatticeError("empty lattice string")
    try:
        rows = [tuple(Fraction(e.strip()) for e in r.split(",")) for r in text.strip().split(";")]
    except (ValueError, ZeroDivisionError) as exc:
        raise LatticeError(f"cannot parse lattice string {text!r}: {exc}") from None
    return _as_matrix(rows)


# -- the lattice type --------------------------------------------------------

@dataclass(frozen=True)
class RationalLattice:
    """Full-rank lattice ``basis @ Z^dim`` with rational basis in canonical form.

    Construct from any nonsingular raw basis (columns are generators); the
    stored ``basis`` is the canonical column HNF.
    """

    basis: Matrix
    dim: int = field(init=False)

    def __post_init__(self):
        raw = _as_matrix(self.basis)
        n = len(raw)
        if _det(raw) == 0:
            raise DegenerateLatticeError()
        canon = _hnf(_transpose(raw), n)
        object.__setattr__(self, "basis", canon)
        object.__setattr__(self, "dim", n)

    @classmethod
    def from_generators(cls, generators: Iterable[Sequence], dim: int) -> "RationalLattice":
        cols = [_as_vector(g, dim) for g in generators]
        if not cols:
            raise DegenerateLatticeError()
        canon = _hnf(cols, dim)
        return cls(canon)

    @cached_property
    def covolume(self) -> Fraction:
        return reduce(lambda a, b: a * b, (self.basis[i][i] for i in range(self.dim)), Fraction(1))

    @property
    def columns(self) -> tuple[Vector, ...]:
        return _transpose(self.basis)

    @property
    def is_diagonal(self) -> bool:
        return all(self.basis[i][j] == 0 for i in range(self.dim) for j in range(self.dim) if i != j)

    @property
    def is_integral(self) -> bool:
        return all(x.denominator == 1 for row in self.basis for x in row)

    @cached_property
    def _inverse(self) -> Matrix:
        return _inverse(self.basis)

    def coordinates(self, v: Sequence) -> Vector:
        """Solve ``basis @ x = v`` over the rationals."""
        vec = _as_vector(v, self.dim)
        h = self.basis
        x: list[Fraction] = []
        for i in range(self.dim):
            acc = vec[i] - sum((h[i][j] * x[j] for j in range(i)), Fraction(0))
            x.append(acc / h[i][i])
        return tuple(x)

    def __contains__(self, v) -> bool:
        return all(c.denominator == 1 for c in self.coordinates(v))

    def reduce(self, v: Sequence) -> Vector:
        """Representative of ``v + L`` inside the half-open box ``prod [0, h_ii)``."""
        out = list(_as_vector(v, self.dim))
        cols = self.columns
        for i in range(self.dim):
            q = math.floor(out[i] / self.basis[i][i])
            if q:
                out = [a - q * b for a, b in zip(out, cols[i])]
        return tuple(out)

    def point(self, coeffs: Sequence[int]) -> Vector:
        return _matvec(self.basis, [Fraction(int(c)) for c in coeffs])

    def to_text(self) -> str:
        return format_matrix(self.basis)

    def to_json(self) -> dict:
        return {"basis": self.to_text(), "covolume": format_rational(self.covolume), "canonical": True}

    def as_float(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.basis])

    def __repr__(self) -> str:
        return f"RationalLattice({self.to_text()!r})"


def canonical_basis(raw_basis) -> RationalLattice:
    if isinstance(raw_basis, str):
        return parse_lattice(raw_basis)
    return RationalLattice(raw_basis)


def integer_lattice(dim: int) -> RationalLattice:
    return RationalLattice(tuple(tuple(Fraction(int(i == j)) for j in range(dim)) for i in range(dim)))


def diagonal_lattice(*entries) -> RationalLattice:
    n = len(entries)
    return RationalLattice(tuple(tuple(_frac(entries[i]) if i == j else Fraction(0) for j in range(n)) for i in range(n)))


def separable_lattice(a, b) -> RationalLattice:
    """``A Z^d x B Z^d`` for d x d rational matrices (or scalars when d = 1)."""
    a = _as_matrix(a if isinstance(a, (list, tuple)) else [[a]])
    b = _as_matrix(b if isinstance(b, (list, tuple)) else [[b]])
    d = len(a)
    if len(b) != d:
        raise LatticeError("separable factors must have equal dimension")
    z = Fraction(0)
    rows = [tuple(a[i]) + (z,) * d for i in range(d)] + [(z,) * d + tuple(b[i]) for i in range(d)]
    return RationalLattice(tuple(rows))


def scale_axes(lat: RationalLattice, factors: Sequence) -> RationalLattice:
    """Image of ``lat`` under ``diag(factors)``."""
    f = [_frac(x) for x in factors]
    if len(f) != lat.dim:
        raise LatticeError("dimension mismatch")
    return RationalLattice(tuple(tuple(f[i] * x for x in row) for i, row in enumerate(lat.basis)))


def _check_dims(*lats: RationalLattice) -> None:
    if len({lat.dim for lat in lats}) != 1:
        raise LatticeError("dimension mismatch")


def member(lat: RationalLattice, v) -> bool:
    _as_vector(v, lat.dim)
    return v in lat


def sublattice_of(l1: RationalLattice, l2: RationalLattice) -> bool:
    _check_dims(l1, l2)
    return all(c in l2 for c in l1.columns)


@lru_cache(maxsize=4096)
def dual(gamma: RationalLattice) -> RationalLattice:
    """Annihilator ``(A^{-1})^T Z^dim``."""
    return RationalLattice(_transpose(gamma._inverse))


def _symplectic_j(dim: int) -> Matrix:
    if dim % 2:
        raise LatticeError("adjoint lattice needs even dimension 2d")
    d = dim // 2
    rows = []
    for i in range(dim):
        row = [Fraction(0)] * dim
        if i < d:
            row[i + d] = Fraction(1)
        else:
            row[i - d] = Fraction(-1)
        rows.append(tuple(row))
    return tuple(rows)


def adjoint_formula(raw_basis) -> Matrix:
    """``J (A^{-1})^T`` for the raw basis as given, columns sign-normalised.

    Each column is negated if its first nonzero entry is negative.  This is
    the matrix-formula route, kept separate from the canonical form.
    """
    a = _as_matrix(raw_basis) if not isinstance(raw_basis, str) else parse_matrix(raw_basis)
    m = _matmul(_symplectic_j(len(a)), _transpose(_inverse(a)))
    cols = []
    for c in _transpose(m):
        first = next(x for x in c if x != 0)
        cols.append(tuple(-x for x in c) if first < 0 else c)
    return _transpose(tuple(cols))


@lru_cache(maxsize=4096)
def adjoint(lam: RationalLattice) -> RationalLattice:
    """Adjoint lattice ``J (A^{-1})^T Z^{2d}`` with ``J = [[0, I], [-I, 0]]``."""
    return RationalLattice(_matmul(_symplectic_j(lam.dim), _transpose(lam._inverse)))


def join(lam: RationalLattice, extra: Iterable[Sequence]) -> RationalLattice:
    cols = list(lam.columns) + [_as_vector(v, lam.dim) for v in extra]
    return RationalLattice(_hnf(cols, lam.dim))


def index(sub: RationalLattice, sup: RationalLattice) -> int:
    if not sublattice_of(sub, sup):
        raise LatticeError("not a sublattice")
    ratio = sub.covolume / sup.covolume
    if ratio.denominator != 1:  # pragma: no cover - impossible for true sublattices
        raise LatticeError("non-integral index")
    return int(ratio)


# -- cosets ------------------------------------------------------------------

@dataclass(frozen=True)
class CosetPartition:
    """The quotient ``superlattice / sublattice`` with one representative per coset.

    Representatives are reduced modulo the sublattice into its HNF box (which
    lies inside ``[0,1)^dim`` whenever the sublattice contains ``Z^dim``),
    with 0 first and the rest in lexicographic order.
    """

    superlattice: RationalLattice
    sublattice: RationalLattice
    representatives: tuple[Vector, ...]

    @property
    def order(self) -> int:
        return len(self.representatives)

    @cached_property
    def _lookup(self) -> dict[Vector, int]:
        return {r: i for i, r in enumerate(self.representatives)}

    def label(self, v) -> int:
        """Index ``l`` of the coset containing ``v`` (which must lie in the superlattice)."""
        vec = _as_vector(v, self.superlattice.dim)
        if vec not in self.superlattice:
            raise LatticeError(f"{tuple(map(format_rational, vec))} is not in the superlattice")
        return self._lookup[self.sublattice.reduce(vec)]

    def to_json(self) -> dict:
        return {
            "N": self.order,
            "representatives": [[format_rational(x) for x in r] for r in self.representatives],
        }


def _box_points(diag: Sequence[int]):
    return itertools.product(*(range(d) for d in diag))


@lru_cache(maxsize=4096)
def quotient_cosets(sup: RationalLattice, sub: RationalLattice) -> CosetPartition:
    n = index(sub, sup)
    if n > ENUMERATION_GUARD:
        raise IndexGuardError(f"quotient of order {n} exceeds the enumeration guard {ENUMERATION_GUARD}")
    # sub expressed in sup coordinates is an integer matrix K; reps of Z^n / K Z^n
    k_cols = [sup.coordinates(c) for c in sub.columns]
    k_hnf = _hnf_int_columns([[int(x) for x in c] for c in k_cols], sup.dim)
    diag = [k_hnf[i][i] for i in range(sup.dim)]
    reps = {sub.reduce(sup.point(c)) for c in _box_points(diag)}
    zero = tuple(Fraction(0) for _ in range(sup.dim))
    ordered = (zero,) + tuple(sorted(reps - {zero}))
    if len(ordered) != n:  # pragma: no cover - guards the enumeration itself
        raise LatticeError("coset enumeration failed")
    return CosetPartition(sup, sub, ordered)


def coset_character(partition: CosetPartition, ell: int, ab) -> complex:
    """``exp(2 pi i (b.u - a.eta))`` for the representative ``(u, eta)`` of coset ``ell``.

    Well defined on the coset because ``(a, b)`` lies in the adjoint of the
    sublattice; this is checked exactly on a second representative.
    """
    dim = partition.superlattice.dim
    vec = _as_vector(ab, dim)
    tilde = adjoint(partition.sublattice)
    if vec not in tilde:
        raise LatticeError("character undefined off the adjoint of the sublattice")
    if not 0 <= ell < partition.order:
        raise LatticeError(f"coset index {ell} out of range")
    rep = partition.representatives[ell]
    phase = _character_phase(rep, vec)
    shifted = tuple(r + s for r, s in zip(rep, partition.sublattice.point([1] * dim)))
    if _character_phase(shifted, vec) != phase:  # pragma: no cover - holds by adjointness
        raise LatticeError("character is not constant on the coset")
    return _unit(phase)


def _character_phase(ueta: Vector, ab: Vector) -> Fraction:
    d = len(ueta) // 2
    u, eta = ueta[:d], ueta[d:]
    a, b = ab[:d], ab[d:]
    val = sum((bi * ui for bi, ui in zip(b, u)), Fraction(0)) - sum((ai * ei for ai, ei in zip(a, eta)), Fraction(0))
    return val - math.floor(val)


def _unit(phase: Fraction) -> complex:
    """``exp(2 pi i phase)`` with exact values at multiples of 1/4."""
    quarter = {Fraction(0): 1 + 0j, Fraction(1, 4): 1j, Fraction(1, 2): -1 + 0j, Fraction(3, 4): -1j}
    if phase in quarter:
        return quarter[phase]
    return cmath.exp(2j * math.pi * float(phase))


# -- fundamental domains -----------------------------------------------------

@dataclass(frozen=True)
class FundamentalDomain:
    """A fundamental domain of ``lattice`` inside ``[0,1)^dim``.

    ``kind == "box"``: the half-open box ``prod [0, upper_i)``.
    ``kind == "digits"``: one grid node per lattice orbit, at ``resolution``.
    """

    lattice: RationalLattice
    kind: str
    upper: tuple[Fraction, ...] | None = None
    digits: tuple[Vector, ...] | None = None
    resolution: tuple[int, ...] | None = None

    def contains(self, point) -> bool:
        p = _as_vector(point, self.lattice.dim)
        if self.kind == "box":
            return all(0 <= x < u for x, u in zip(p, self.upper))
        return p in set(self.digits)

    def node_mask(self, resolution: Sequence[int]) -> np.ndarray:
        """Boolean array over the grid ``{i / res}`` of ``[0,1)^dim``."""
        res = tuple(int(r) for r in resolution)
        mask = np.zeros(res, dtype=bool)
        for idx in itertools.product(*(range(r) for r in res)):
            mask[idx] = self.contains(tuple(Fraction(i, r) for i, r in zip(idx, res)))
        return mask

    def to_json(self) -> dict:
        if self.kind == "box":
            return {"kind": "box", "upper": [format_rational(u) for u in self.upper]}
        return {"kind": "digits", "digits": [[format_rational(x) for x in d] for d in self.digits]}


def grid_refines(lat: RationalLattice, resolution: Sequence[int]) -> bool:
    """True when every lattice point lies on the grid ``prod (1/res_i) Z``."""
    return all((x * resolution[i]).denominator == 1 for i, row in enumerate(lat.basis) for x in row)


def _check_refines(lat: RationalLattice, resolution: Sequence[int]) -> None:
    if not grid_refines(lat, resolution):
        raise LatticeError(f"grid resolution {tuple(resolution)} does not refine the lattice {lat.to_text()}")


def fundamental_domain(lat: RationalLattice, resolution: Sequence[int] | None = None) -> FundamentalDomain:
    """Canonical fundamental domain of a lattice containing ``Z^dim``.

    Diagonal bases give the box ``prod [0, h_ii)``; otherwise the digit set of
    HNF-reduced grid nodes at ``resolution``.
    """
    if not sublattice_of(integer_lattice(lat.dim), lat):
        raise LatticeError("lattice must contain Z^dim for a domain inside the unit cube")
    if resolution is None:
        resolution = minimal_resolution(lat)
    res = tuple(int(r) for r in resolution)
    if len(res) != lat.dim or min(res) < 1:
        raise LatticeError("resolution must give one positive integer per axis")
    _check_refines(lat, res)
    if lat.is_diagonal:
        return FundamentalDomain(lat, "box", upper=tuple(lat.basis[i][i] for i in range(lat.dim)), resolution=res)
    digits = []
    for idx in itertools.product(*(range(r) for r in res)):
        p = tuple(Fraction(i, r) for i, r in zip(idx, res))
        if lat.reduce(p) == p:
            digits.append(p)
    return FundamentalDomain(lat, "digits", digits=tuple(digits), resolution=res)


def minimal_resolution(lat: RationalLattice) -> tuple[int, ...]:
    """Per-axis lcm of denominators: the coarsest grid refining ``lat``."""
    return tuple(_common_denominator(row) for row in lat.basis)


# -- intermediate lattices ---------------------------------------------------

def intermediate_lattices(lam: RationalLattice, ambient: RationalLattice) -> list[RationalLattice]:
    """All lattices between ``lam`` and ``ambient``, sorted by index over ``lam``.

    Enumerates the subgroups of the finite abelian group ``ambient / lam`` by
    closing under single generators, deduplicating by canonical form.
    """
    n = index(lam, ambient)
    if n > ENUMERATION_GUARD:
        raise IndexGuardError(f"index {n} exceeds the enumeration guard {ENUMERATION_GUARD}")
    seen = {lam}
    frontier = [lam]
    while frontier:
        nxt = []
        for h in frontier:
            for g in quotient_cosets(ambient, h).representatives[1:]:
                bigger = join(h, [g])
                if bigger not in seen:
                    seen.add(bigger)
                    nxt.append(bigger)
        frontier = nxt
    return sorted(seen, key=lambda s: (-s.covolume, s.basis))


def random_lattice(rng: random.Random, dim: int = 2, max_entry: int = 6, rational: bool = True) -> RationalLattice:
    """Random nonsingular lattice, used by property tests and benchmarks."""
    while True:
        den = rng.randint(1, 4) if rational else 1
        m = [[Fraction(rng.randint(-max_entry, max_entry), den) for _ in range(dim)] for _ in range(dim)]
        if _det(tuple(map(tuple, m))) != 0:
            return RationalLattice(m)

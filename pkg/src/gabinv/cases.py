"""The eight intermediate lattices between 4Z x 2Z and Z^2, as worked examples."""

from __future__ import annotations

from dataclasses import dataclass

from .lattice import RationalLattice, parse_lattice

__all__ = ["ExampleCase", "BASE_LATTICE", "CASES", "case", "default_marks"]

BASE_LATTICE = "4,0;0,2"


@dataclass(frozen=True)
class ExampleCase:
    name: str
    tilde_text: str
    marks: tuple[tuple[int, int], ...]
    adjoint_text: str  # generator matrix of the adjoint, as displayed in the worked example

    @property
    def tilde(self) -> RationalLattice:
        return parse_lattice(self.tilde_text)

    @property
    def adjoint_displayed(self) -> RationalLattice:
        return parse_lattice(self.adjoint_text)


CASES: tuple[ExampleCase, ...] = (
    ExampleCase("i", "4,0;0,2", ((0, 0),), "1/2,0;0,1/4"),
    ExampleCase("ii", "1,0;0,2", ((1, 0),), "1/2,0;0,1"),
    ExampleCase("iii", "2,0;0,2", ((2, 0),), "1/2,0;0,1/2"),
    ExampleCase("iv", "4,0;0,1", ((0, 1),), "1,0;0,1/4"),
    ExampleCase("v", "2,1;0,1", ((1, 1),), "1/2,1;1/2,0"),
    ExampleCase("vi", "4,2;0,1", ((2, 1),), "1/2,1;1/4,0"),
    ExampleCase("vii", "2,0;0,1", ((0, 1), (2, 0)), "1,0;0,1/2"),
    ExampleCase("viii", "1,0;0,1", ((0, 1), (1, 0)), "1,0;0,1"),
)


def case(name: str) -> ExampleCase:
    for c in CASES:
        if c.name == name:
            return c
    raise KeyError(f"unknown example case {name!r}; expected one of {', '.join(c.name for c in CASES)}")


def default_marks(lam: RationalLattice, tilde: RationalLattice) -> tuple[tuple, ...]:
    """Canonical generators of ``tilde`` outside ``lam``, or the origin when ``tilde == lam``."""
    marks = tuple(c for c in tilde.columns if c not in lam)
    return marks or (tuple(0 for _ in range(tilde.dim)),)

"""Decide and certify extra time-frequency invariance of Gabor spaces on integer lattices."""

__version__ = "0.1.0"

from .lattice import (  # noqa: E402
    RationalLattice,
    adjoint,
    canonical_basis,
    dual,
    intermediate_lattices,
    join,
    parse_lattice,
    quotient_cosets,
)
from .zak import WindowSpec, ZakGrid, ZakSplit, finite_zak, inverse_finite_zak  # noqa: E402
from .finite_gabor import FiniteGaborModel, membership, project, tf_shift  # noqa: E402
from .invariance import (  # noqa: E402
    InvarianceReport,
    brute_force_invariant,
    brute_force_lattice,
    check,
    condition_d,
    decompose,
    model_for,
)

__all__ = [
    "__version__",
    "RationalLattice",
    "adjoint",
    "canonical_basis",
    "dual",
    "intermediate_lattices",
    "join",
    "parse_lattice",
    "quotient_cosets",
    "WindowSpec",
    "ZakGrid",
    "ZakSplit",
    "finite_zak",
    "inverse_finite_zak",
    "FiniteGaborModel",
    "membership",
    "project",
    "tf_shift",
    "InvarianceReport",
    "brute_force_invariant",
    "brute_force_lattice",
    "check",
    "condition_d",
    "decompose",
    "model_for",
]

"""scikit-learn style wrappers around the finite model.

Rows of ``X`` are signals in ``C^L``.  Lattices are given in model units
(``"4,0;0,2"``), as everywhere else in the package.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_complex_array, check_lattice, check_positive_int, check_tolerance
from .finite_gabor import membership, project
from .invariance import check, decompose, geometry, model_for
from .windows import load_window_arg, resolve_window
from .zak import WindowSpec, ZakGrid, ZakSplit, finite_zak, inverse_finite_zak

__all__ = ["ZakTransformer", "GaborSpaceProjector", "InvarianceDecomposer"]


def _window_vector(window, split: ZakSplit) -> np.ndarray:
    if window is None:
        spec = WindowSpec("indicator")
    elif isinstance(window, WindowSpec):
        spec = window
    elif isinstance(window, str):
        spec = load_window_arg(window)
    else:
        return check_complex_array(window, split.L, name="window")[0]
    return resolve_window(spec, split)


class ZakTransformer(TransformerMixin, BaseEstimator):
    """Finite Zak transform of each row, flattened to ``N * M`` complex features."""

    def __init__(self, N: int = 4):
        self.N = N

    def fit(self, X, y=None):
        X = check_complex_array(X)
        self.split_ = ZakSplit(X.shape[1], check_positive_int(self.N, "N"))
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "split_")
        X = check_complex_array(X, self.n_features_in_)
        return np.stack([finite_zak(row, self.split_).values.ravel() for row in X])

    def inverse_transform(self, Z):
        check_is_fitted(self, "split_")
        Z = check_complex_array(Z, self.split_.L, name="Z")
        res = self.split_.resolution
        return np.stack([inverse_finite_zak(ZakGrid(row.reshape(res), split=self.split_)) for row in Z])


class GaborSpaceProjector(TransformerMixin, BaseEstimator):
    """Orthogonal projection onto ``G(phi, Lambda)``; ``predict`` reports membership."""

    def __init__(self, lattice="4,0;0,2", N: int = 4, window=None, tau: float = 1e-9, tol: float = 1e-9):
        self.lattice = lattice
        self.N = N
        self.window = window
        self.tau = tau
        self.tol = tol

    def fit(self, X, y=None):
        X = check_complex_array(X)
        split = ZakSplit(X.shape[1], check_positive_int(self.N, "N"))
        check_tolerance(self.tau, "tau")
        check_tolerance(self.tol, "tol")
        self.model_ = model_for(split, check_lattice(self.lattice), _window_vector(self.window, split))
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "model_")
        X = check_complex_array(X, self.n_features_in_)
        return np.stack([project(row, self.model_, self.tau) for row in X])

    def predict(self, X):
        check_is_fitted(self, "model_")
        X = check_complex_array(X, self.n_features_in_)
        return np.array([membership(row, self.model_, self.tol, self.tau)[0] for row in X])


class InvarianceDecomposer(TransformerMixin, BaseEstimator):
    """Condition (d) at fit time; ``transform`` splits signals along the masks ``B^(l)``.

    After ``fit``: ``report_`` (an :class:`InvarianceReport`), ``masks_`` and
    ``invariant_``.  ``transform`` returns an array of shape ``(n, N_cosets, L)``.
    """

    def __init__(self, lattice="4,0;0,2", lattice_tilde="1,0;0,1", N: int = 4, window=None,
                 tau: float = 1e-9, tol: float = 1e-9, oracle: bool = False):
        self.lattice = lattice
        self.lattice_tilde = lattice_tilde
        self.N = N
        self.window = window
        self.tau = tau
        self.tol = tol
        self.oracle = oracle

    def fit(self, X, y=None):
        X = check_complex_array(X)
        split = ZakSplit(X.shape[1], check_positive_int(self.N, "N"))
        lam = check_lattice(self.lattice)
        self.tilde_ = check_lattice(self.lattice_tilde, "lattice_tilde")
        self.model_ = model_for(split, lam, _window_vector(self.window, split))
        self.report_ = check(self.model_, self.tilde_, check_tolerance(self.tau, "tau"), oracle=self.oracle,
                             tol=check_tolerance(self.tol, "tol"))
        self.masks_ = geometry(self.model_.model_lattice, self.tilde_, split.resolution).masks.masks
        self.invariant_ = self.report_.condition_d
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "model_")
        X = check_complex_array(X, self.n_features_in_)
        return np.stack([decompose(row, self.model_, self.tilde_, self.tau, self.tol).components for row in X])

    def inverse_transform(self, C):
        C = np.asarray(C)
        return C.sum(axis=1)

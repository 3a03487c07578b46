"""Estimator-style front end to the stationary-state analysis."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .graph import decompose_basins
from .laplacian import EDGE_TOL, ProjectorFamily, build_omega, build_rate_graph
from .model import LindbladSystem
from .stationary import asymptotic_state, constraint_vectors, kernel_rank, stationary_orbits
from .validation import SIMPLEX_ENTRY_TOL, SIMPLEX_SUM_TOL, check_threads


class StationaryStateAnalyzer(TransformerMixin, BaseEstimator):
    """Graph analysis of a Lindblad system.

    ``fit`` takes a :class:`LindbladSystem` and computes the rate matrix,
    basins, stationary orbits and conserved quantities.  ``transform`` maps
    initial eigenvalue vectors (rows of ``X``) to basin weights ``c`` and
    ``predict`` maps them to the asymptotic eigenvalue vectors.

    Parameters
    ----------
    method : {"enumerate", "determinant", "both"}
    edge_tol : float
        Rates at or below this value are not edges.
    threads : int
        Worker threads for per-root tree sums.
    """

    def __init__(self, method: str = "enumerate", edge_tol: float = EDGE_TOL, threads: int = 1):
        self.method = method
        self.edge_tol = edge_tol
        self.threads = threads

    def fit(self, X: LindbladSystem, y=None, basis=None):
        if not isinstance(X, LindbladSystem):
            raise TypeError("fit expects a LindbladSystem")
        X.check()
        check_threads(self.threads)
        self.system_ = X
        self.projectors_ = basis if isinstance(basis, ProjectorFamily) or basis is None else ProjectorFamily(basis)
        self.omega_ = build_omega(X, self.projectors_)
        self.graph_ = build_rate_graph(self.omega_, self.edge_tol)
        self.basins_ = decompose_basins(self.graph_)
        self.rank_, _ = kernel_rank(self.omega_, self.basins_)
        self.orbits_ = stationary_orbits(self.graph_, self.basins_, self.method, self.threads)
        self.constraints_ = constraint_vectors(self.graph_, self.basins_, "pruned")
        self.n_features_in_ = X.dim
        return self

    @property
    def n_basins_(self) -> int:
        check_is_fitted(self, "basins_")
        return self.basins_.n_basins

    @property
    def stationary_vectors_(self) -> np.ndarray:
        """Rows are the per-basin stationary eigenvalue vectors."""
        check_is_fitted(self, "orbits_")
        return np.array([o.lambda_inf for o in self.orbits_])

    def _rows(self, X) -> np.ndarray:
        check_is_fitted(self, "orbits_")
        a = check_array(X, dtype=np.float64, ensure_2d=True)
        if a.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {a.shape[1]} columns, expected {self.n_features_in_}")
        if np.any(a < -SIMPLEX_ENTRY_TOL) or np.any(np.abs(a.sum(axis=1) - 1) > SIMPLEX_SUM_TOL):
            raise ValueError("rows of X must be probability vectors")
        return a

    def transform(self, X) -> np.ndarray:
        """Basin weights ``c`` (shape ``(m, n_basins)``) for initial eigenvalue rows."""
        a = self._rows(X)
        out = np.empty((a.shape[0], self.basins_.n_basins))
        for i, row in enumerate(a):
            c, _ = asymptotic_state(self.graph_, self.basins_, row, self.projectors_, self.orbits_, self.constraints_)
            out[i] = [float(x) for x in c]
        return out

    def predict(self, X) -> np.ndarray:
        """Asymptotic eigenvalue vectors (shape ``(m, n)``)."""
        return self.transform(X) @ self.stationary_vectors_

    def predict_state(self, lambda0) -> np.ndarray:
        """Asymptotic density matrix for one initial eigenvalue vector."""
        self._rows(np.atleast_2d(lambda0))
        _, rho = asymptotic_state(self.graph_, self.basins_, lambda0, self.projectors_, self.orbits_, self.constraints_)
        return rho

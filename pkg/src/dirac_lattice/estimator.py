"""A scikit-learn style front end for the constraint analysis."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._parallel import threads
from .dirac import classify, count_dof, run_algorithm
from .lattice import LatticeSpec
from .validation import check_extent, check_rational_array, check_theory


class DiracAnalysis(TransformerMixin, BaseEstimator):
    """Run the constraint algorithm for one theory on one periodic lattice.

    ``fit`` takes no data: the theory and lattice are hyperparameters.  After
    fitting, ``transform`` evaluates every constraint at a batch of phase
    points, one row per point, which is handy for checking that sampled
    data lies on the constraint surface.

    Parameters
    ----------
    theory : str, path or TheorySpec
    n : int
        Spatial extent of the lattice.
    reference_n : int or None
        Second extent used to split the DOF count into a per-site density
        and a volume-independent remainder.
    n_threads : int
    """

    def __init__(self, theory="paper_g0", n=2, reference_n=None, n_threads=1):
        self.theory = theory
        self.n = n
        self.reference_n = reference_n
        self.n_threads = n_threads

    def fit(self, X=None, y=None):
        spec = check_theory(self.theory)
        n = check_extent(self.n)
        ref_n = None if self.reference_n is None else check_extent(self.reference_n, "reference_n")
        if ref_n == n:
            raise ValueError("reference_n must differ from n")
        with threads(check_extent(self.n_threads, "n_threads", ceiling=None)):
            constraints, mult, h = run_algorithm(spec, LatticeSpec(n))
            cc = classify(constraints, mult)
            reference = None
            if ref_n is not None:
                rc, rm, _ = run_algorithm(spec, LatticeSpec(ref_n))
                reference = count_dof(classify(rc, rm))
        self.spec_ = spec
        self.constraints_ = constraints
        self.classified_ = cc
        self.hamiltonian_ = h
        self.multipliers_ = mult
        self.dof_ = count_dof(cc, reference)
        self.n_features_in_ = cc.catalog.dim
        return self

    def transform(self, X):
        check_is_fitted(self, "classified_")
        Z = check_rational_array(X, self.n_features_in_)
        out = np.empty((Z.shape[0], len(self.constraints_)), dtype=object)
        for r in range(Z.shape[0]):
            row = list(Z[r])
            for k, c in enumerate(self.constraints_):
                out[r, k] = c.functional.evaluate(row)
        return out

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "classified_")
        return np.array([c.label for c in self.constraints_], dtype=object)

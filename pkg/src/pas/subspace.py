"""Per-class linear subspace estimation and squared-residual distances.

A fitted subspace is an affine model: a sample mean plus an orthonormal
basis of the top principal directions of the (optionally weighted)
mean-centered fitting set.  Its squared reconstruction residual doubles
as the distance function used everywhere else in the package.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, EmptyFit, NonFinite

# Eigenvalues below RANK_TOL * trace(covariance) are treated as zero rank.
RANK_TOL = 1e-12


@dataclass(frozen=True)
class Subspace:
    """Mean, orthonormal basis and eigenvalue spectrum of one fitted class.

    basis has shape (d, effective_dim) with orthonormal columns; spectrum
    holds the matching covariance eigenvalues in nonincreasing order.
    effective_dim may be smaller than the requested dimension when the
    fitting set is rank deficient (it is 0 for a single-point fit, in
    which case residuals reduce to squared distances from the mean).
    """

    mean: np.ndarray
    basis: np.ndarray
    spectrum: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def dim(self):
        """Ambient feature dimension d."""
        return self.mean.shape[0]

    @property
    def effective_dim(self):
        return self.basis.shape[1]


def _as_float_matrix(X):
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise DimensionMismatch("expected a 2-D sample matrix, got ndim=%d" % X.ndim)
    return X


def fit_pca(X, dim, weights=None):
    """Fit the top-`dim` principal directions of the rows of X.

    Parameters
    ----------
    X : array, shape (n, d)
        Sample rows.
    dim : int
        Requested subspace dimension (>= 1).  The effective dimension is
        clamped to min(dim, d, rank of the centered data).
    weights : array, shape (n,), optional
        Nonnegative sample weights; at least one must be positive.

    Returns
    -------
    Subspace
        Deterministic across runs: eigenvalues sorted nonincreasing and
        each basis column flipped so its largest-magnitude entry is
        nonnegative.
    """
    X = _as_float_matrix(X)
    n, d = X.shape
    if n == 0:
        raise EmptyFit("cannot fit a subspace on zero rows")
    if not np.isfinite(X).all():
        raise NonFinite("sample matrix contains NaN/Inf")
    if dim < 1:
        raise ValueError("requested dimension must be >= 1, got %r" % (dim,))

    if weights is None:
        w = np.full(n, 1.0 / n)
        n_pos = n
    else:
        weights = np.asarray(weights, dtype=float)
        if weights.shape != (n,):
            raise DimensionMismatch("weights shape %r does not match %d rows"
                                    % (weights.shape, n))
        if not np.isfinite(weights).all():
            raise NonFinite("weights contain NaN/Inf")
        if (weights < 0).any():
            raise ValueError("weights must be nonnegative")
        total = weights.sum()
        if total <= 0.0:
            raise EmptyFit("all weights are zero")
        w = weights / total
        n_pos = int((weights > 0).sum())

    mean = w @ X
    Y = X - mean

    if d <= n:
        # d x d covariance route
        cov = (Y * w[:, None]).T @ Y
        evals, evecs = np.linalg.eigh(cov)
        evals = evals[::-1]
        evecs = evecs[:, ::-1]
    else:
        # n x n Gram route for wide data
        A = np.sqrt(w)[:, None] * Y
        gram = A @ A.T
        evals, units = np.linalg.eigh(gram)
        evals = evals[::-1]
        units = units[:, ::-1]
        pos = evals > 0
        evecs = np.zeros((d, n))
        if pos.any():
            evecs[:, pos] = (A.T @ units[:, pos]) / np.sqrt(evals[pos])

    trace = max(float(evals.sum()), 0.0)
    rank = int((evals > RANK_TOL * trace).sum())
    d_eff = min(int(dim), d, max(n_pos - 1, 0), rank)

    basis = evecs[:, :d_eff].copy()
    spectrum = np.maximum(evals[:d_eff], 0.0)

    # sign convention: largest-magnitude entry of each column nonnegative
    for j in range(d_eff):
        k = int(np.argmax(np.abs(basis[:, j])))
        if basis[k, j] < 0:
            basis[:, j] = -basis[:, j]

    return Subspace(mean=mean, basis=basis, spectrum=spectrum)


def _check_vector(S, x):
    x = np.asarray(x, dtype=float)
    if x.shape != (S.dim,):
        raise DimensionMismatch("expected a %d-vector, got shape %r"
                                % (S.dim, x.shape))
    return x


def project(S, x):
    """Coordinates of x in the subspace basis: basis.T @ (x - mean)."""
    x = _check_vector(S, x)
    return S.basis.T @ (x - S.mean)


def residual_sq(S, x):
    """Squared reconstruction residual of x against the subspace.

    Zero exactly when x - mean lies in the span of the basis.
    """
    x = _check_vector(S, x)
    y = x - S.mean
    r = y - S.basis @ (S.basis.T @ y)
    return float(r @ r)


def residuals_sq(S, X):
    """Row-wise squared residuals for a whole sample matrix."""
    X = _as_float_matrix(X)
    if X.shape[1] != S.dim:
        raise DimensionMismatch("expected %d columns, got %d" % (S.dim, X.shape[1]))
    Y = X - S.mean
    R = Y - (Y @ S.basis) @ S.basis.T
    return np.einsum("ij,ij->i", R, R)

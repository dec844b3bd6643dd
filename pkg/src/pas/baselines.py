"""Reference classifiers: 1-nearest-neighbor and the source-only subspace model."""

import numpy as np
from scipy.spatial.distance import cdist

from .core import PasConfig, SourceLabels, fit_class_subspaces
from .errors import DimensionMismatch


def nn1_classify(source, X_t):
    """Label each target row with the label of its Euclidean-nearest source row.

    Exact pairwise distances, ties to the lowest source index.
    """
    X_t = np.asarray(X_t, dtype=float)
    if X_t.shape[1] != source.features.shape[1]:
        raise DimensionMismatch("target dim %d != source dim %d"
                                % (X_t.shape[1], source.features.shape[1]))
    nearest = np.argmin(cdist(X_t, source.features), axis=1)
    return source.labels[nearest]


def pas_c(source, dim=1):
    """Source-only per-class subspace model (no target refinement).

    Identical to the stage-0 initialization of the progressive fit.
    """
    config = PasConfig(dim=dim)
    labels = SourceLabels(labels=source.labels, num_classes=source.num_classes)
    return fit_class_subspaces(source.features, labels, config=config)

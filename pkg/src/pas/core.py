"""Progressive adaptation of per-class subspaces.

The solver alternates four closed-form block updates: refit each class
subspace on its source samples plus currently anchored targets, recompute
target-to-subspace distances, reassign memberships to the nearest
subspace, and re-anchor the targets whose assigned distance falls
strictly below the threshold.  Each update is the global minimizer of
its block, so the unified objective never increases within a stage.
A stage schedule raises the anchoring threshold from the 0% to the 100%
distance quantile, admitting target samples in order of reliability.
"""

import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ConfigError,
    DimensionMismatch,
    EmptyTarget,
    NonFinite,
    RangeError,
)
from .subspace import Subspace, fit_pca, residuals_sq


@dataclass
class PasConfig:
    """Solver configuration.

    dim is the requested per-class subspace dimension (1 is a good
    closed-set default; around 10 suits partial-DA with many source
    classes).  schedule_step is the anchored-fraction increment per
    stage.  seed is reserved for tie randomization and unused by
    default: all tie-breaks are deterministic (smallest index).
    """

    dim: int = 1
    schedule_step: float = 0.01
    inner_tol: float = 1e-6
    inner_max_iters: int = 50
    seed: int = 0

    def __post_init__(self):
        if self.dim < 1:
            raise ConfigError("dim must be >= 1, got %r" % (self.dim,))
        if not (0.0 < self.schedule_step <= 1.0):
            raise ConfigError("schedule_step must be in (0, 1], got %r"
                              % (self.schedule_step,))
        if self.inner_tol <= 0.0:
            raise ConfigError("inner_tol must be positive")
        if self.inner_max_iters < 1:
            raise ConfigError("inner_max_iters must be >= 1")

    def to_dict(self):
        return {
            "dim": self.dim,
            "schedule_step": self.schedule_step,
            "inner_tol": self.inner_tol,
            "inner_max_iters": self.inner_max_iters,
            "seed": self.seed,
        }


@dataclass
class SourceLabels:
    """Class indices in {0..num_classes-1}; every class must occur."""

    labels: np.ndarray
    num_classes: int

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64)
        if labels.ndim != 1:
            raise DimensionMismatch("labels must be a 1-D vector")
        if self.num_classes < 1:
            raise RangeError("num_classes must be >= 1")
        if labels.size and (labels.min() < 0 or labels.max() >= self.num_classes):
            raise RangeError("labels outside {0..%d}" % (self.num_classes - 1))
        present = np.unique(labels)
        if present.size != self.num_classes:
            missing = sorted(set(range(self.num_classes)) - set(present.tolist()))
            raise RangeError("source classes %r have no samples" % (missing,))
        object.__setattr__(self, "labels", labels)


@dataclass
class AnchorState:
    """Target-side state: memberships W, anchor indicators v, threshold, distances."""

    memberships: np.ndarray   # (m, K) one-hot
    anchors: np.ndarray       # (m,) in {0, 1}
    threshold: float
    distances: np.ndarray     # (m,) residual to the assigned subspace

    def check(self):
        """Assert the state invariants; raises AssertionError on violation."""
        W, v, c = self.memberships, self.anchors, self.distances
        assert W.ndim == 2 and (W.sum(axis=1) == 1).all(), "rows of W must be one-hot"
        assert np.isin(v, (0, 1)).all(), "anchor indicators must be 0/1"
        assert (c >= 0).all(), "distances must be nonnegative"
        assert (c[v == 1] < self.threshold).all(), \
            "anchored samples must satisfy distance < threshold"


@dataclass
class PasModel:
    """K fitted subspaces plus the configuration that produced them."""

    subspaces: list
    config: PasConfig

    @property
    def num_classes(self):
        return len(self.subspaces)

    @property
    def feature_dim(self):
        return self.subspaces[0].dim


@dataclass
class StageRecord:
    stage: int
    fraction: float
    threshold: float
    anchored: int
    objective: float
    pseudo_accuracy: float | None = None


@dataclass
class FitTrace:
    """Per-stage log of the progressive schedule."""

    records: list = field(default_factory=list)

    def append(self, record):
        self.records.append(record)

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __getitem__(self, i):
        return self.records[i]


def _check_features(X, name="features"):
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise DimensionMismatch("%s must be 2-D, got ndim=%d" % (name, X.ndim))
    if not np.isfinite(X).all():
        raise NonFinite("%s contain NaN/Inf" % name)
    return X


def compute_distances(model, X_t):
    """m x K matrix of squared residuals of each row to each class subspace."""
    X_t = _check_features(X_t, "target features")
    if X_t.shape[1] != model.feature_dim:
        raise DimensionMismatch("feature dim %d does not match model dim %d"
                                % (X_t.shape[1], model.feature_dim))
    dists = np.empty((X_t.shape[0], model.num_classes))
    for k, S in enumerate(model.subspaces):
        dists[:, k] = residuals_sq(S, X_t)
    return dists


def assign_memberships(dists):
    """One-hot assignment of each row to its minimum-distance class.

    Ties break to the smallest class index, which makes runs
    deterministic.
    """
    dists = np.asarray(dists, dtype=float)
    if not np.isfinite(dists).all():
        raise NonFinite("distance matrix contains NaN/Inf")
    m, K = dists.shape
    W = np.zeros((m, K), dtype=np.int64)
    W[np.arange(m), np.argmin(dists, axis=1)] = 1
    return W


def anchor(c, lam):
    """Indicator of samples anchored at threshold lam: 1 iff c_j < lam (strict)."""
    c = np.asarray(c, dtype=float)
    return (c < lam).astype(np.int64)


def lambda_for_fraction(c, fraction):
    """Smallest threshold anchoring at least ceil(fraction * m) samples.

    fraction = 0 returns 0 (anchors nothing, since anchoring is strict);
    fraction = 1 returns a value strictly above max(c).
    """
    c = np.asarray(c, dtype=float)
    if c.size == 0:
        raise EmptyTarget("no target distances")
    if not (0.0 <= fraction <= 1.0):
        raise ConfigError("fraction must be in [0, 1], got %r" % (fraction,))
    # the 1e-9 guard absorbs float noise in fraction * m (e.g. 17 * 0.01 * 300)
    t = int(math.ceil(fraction * c.size - 1e-9))
    if t <= 0:
        return 0.0
    s = np.sort(c)
    u = s[t - 1]
    bigger = s[s > u]
    if bigger.size:
        return float(bigger[0])
    return float(u * (1.0 + 1e-9) + 1e-12)


def _source_groups(labels):
    return [np.flatnonzero(labels.labels == k) for k in range(labels.num_classes)]


def _source_residual_total(model, X_s, labels):
    total = 0.0
    for k, idx in enumerate(_source_groups(labels)):
        total += float(residuals_sq(model.subspaces[k], X_s[idx]).sum())
    return total


def objective(model, X_s, labels, X_t, state):
    """Unified objective: source residuals + anchored target residuals - lam * #anchored."""
    X_s = _check_features(X_s, "source features")
    dists = compute_distances(model, X_t)
    W = state.memberships
    if W.shape != dists.shape:
        raise DimensionMismatch("membership shape %r does not match distances %r"
                                % (W.shape, dists.shape))
    v = state.anchors
    target_term = float((v * (W * dists).sum(axis=1)).sum())
    return (_source_residual_total(model, X_s, labels)
            + target_term - state.threshold * float(v.sum()))


def fit_class_subspaces(X_s, labels, X_t=None, state=None, config=None):
    """Fit one subspace per class on its source rows plus anchored targets.

    For class k the fitting set is the source rows labeled k followed by
    the target rows with membership k and anchor indicator 1, in their
    original row order.  With no state (or nothing anchored) this is the
    plain per-class source PCA.
    """
    config = config or PasConfig()
    X_s = _check_features(X_s, "source features")
    if labels.labels.shape[0] != X_s.shape[0]:
        raise RangeError("label count %d does not match %d source rows"
                         % (labels.labels.shape[0], X_s.shape[0]))
    subspaces = []
    for k, idx in enumerate(_source_groups(labels)):
        rows = X_s[idx]
        if state is not None and X_t is not None:
            picked = (state.memberships[:, k] == 1) & (state.anchors == 1)
            if picked.any():
                rows = np.vstack([rows, X_t[picked]])
        subspaces.append(fit_pca(rows, dim=config.dim))
    return PasModel(subspaces=subspaces, config=config)


def inner_solve(X_s, labels, X_t, lam, warm_state=None, config=None):
    """Alternate the block updates at a fixed threshold until convergence.

    Returns (model, state, history) where history holds the objective
    after every full iteration; it is nonincreasing up to roundoff
    because each block update is a global minimizer given the others.
    """
    config = config or PasConfig()
    X_s = _check_features(X_s, "source features")
    X_t = _check_features(X_t, "target features")
    if X_s.shape[1] != X_t.shape[1]:
        raise DimensionMismatch("source dim %d != target dim %d"
                                % (X_s.shape[1], X_t.shape[1]))

    state = warm_state
    history = []
    model = None
    for _ in range(config.inner_max_iters):
        model = fit_class_subspaces(X_s, labels, X_t, state, config)
        dists = compute_distances(model, X_t)
        W = assign_memberships(dists)
        c = dists.min(axis=1)
        v = anchor(c, lam)
        state = AnchorState(memberships=W, anchors=v, threshold=lam, distances=c)
        obj = (_source_residual_total(model, X_s, labels)
               + float((v * c).sum()) - lam * float(v.sum()))
        history.append(obj)
        if len(history) >= 2:
            prev = history[-2]
            if abs(history[-1] - prev) <= config.inner_tol * max(1.0, abs(prev)):
                break
    return model, state, history


def _accuracy(pred, truth):
    return float(np.mean(pred == truth))


def fit_progressive(X_s, labels, X_t, config=None, eval_labels=None):
    """Run the full progressive schedule and return (model, trace).

    Stage 0 fits with threshold 0 (source-only initialization); each
    later stage raises the threshold to the quantile of the current
    assigned distances for fraction step, 2*step, ..., 1.0, warm-starting
    the inner solver from the previous stage.  The threshold never
    decreases across stages.  With eval_labels given, each stage records
    the pseudo-label accuracy of the current assignments.
    """
    config = config or PasConfig()
    X_s = _check_features(X_s, "source features")
    X_t = _check_features(X_t, "target features")
    if X_t.shape[0] == 0:
        raise EmptyTarget("target set is empty")
    if X_s.shape[1] != X_t.shape[1]:
        raise DimensionMismatch("source dim %d != target dim %d"
                                % (X_s.shape[1], X_t.shape[1]))
    if eval_labels is not None:
        eval_labels = np.asarray(eval_labels, dtype=np.int64)
        if eval_labels.shape[0] != X_t.shape[0]:
            raise RangeError("eval label count does not match target rows")

    def record(trace, stage, fraction, lam, state, history):
        acc = None
        if eval_labels is not None:
            acc = _accuracy(np.argmax(state.memberships, axis=1), eval_labels)
        trace.append(StageRecord(stage=stage, fraction=fraction, threshold=lam,
                                 anchored=int(state.anchors.sum()),
                                 objective=history[-1], pseudo_accuracy=acc))

    trace = FitTrace()
    model, state, history = inner_solve(X_s, labels, X_t, 0.0, None, config)
    record(trace, 0, 0.0, 0.0, state, history)

    step = config.schedule_step
    num_stages = int(math.ceil(1.0 / step - 1e-9))
    lam = 0.0
    for s in range(1, num_stages + 1):
        fraction = 1.0 if s == num_stages else min(1.0, s * step)
        lam = max(lam, lambda_for_fraction(state.distances, fraction))
        model, state, history = inner_solve(X_s, labels, X_t, lam, state, config)
        record(trace, s, fraction, lam, state, history)
    return model, trace


def predict(model, X):
    """Label each row with its minimum-residual subspace index."""
    dists = compute_distances(model, X)
    return np.argmin(dists, axis=1)


# --- model persistence ----------------------------------------------------
#
# JSON schema: {feature_dim, num_classes, dim,
#               subspaces: [{mean, basis (column-major flat list), spectrum}],
#               config: {dim, schedule_step, inner_tol, inner_max_iters, seed}}
# Floats are serialized via repr and round-trip exactly, so a reloaded
# model reproduces predictions bit for bit.

def model_to_dict(model):
    subspaces = []
    for S in model.subspaces:
        subspaces.append({
            "mean": [float(x) for x in S.mean],
            "basis": [float(x) for x in S.basis.ravel(order="F")],
            "spectrum": [float(x) for x in S.spectrum],
        })
    return {
        "feature_dim": model.feature_dim,
        "num_classes": model.num_classes,
        "dim": model.config.dim,
        "subspaces": subspaces,
        "config": model.config.to_dict(),
    }


def model_from_dict(doc):
    try:
        d = int(doc["feature_dim"])
        config = PasConfig(**doc["config"])
        subspaces = []
        for entry in doc["subspaces"]:
            mean = np.asarray(entry["mean"], dtype=float)
            spectrum = np.asarray(entry["spectrum"], dtype=float)
            d_eff = spectrum.shape[0]
            basis = np.asarray(entry["basis"], dtype=float).reshape((d, d_eff),
                                                                    order="F")
            subspaces.append(Subspace(mean=mean, basis=basis, spectrum=spectrum))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError("malformed model document: %s" % exc) from exc
    if len(subspaces) != int(doc["num_classes"]):
        raise ConfigError("subspace count does not match num_classes")
    return PasModel(subspaces=subspaces, config=config)


def save_model(model, path):
    data = json.dumps(model_to_dict(model), indent=2)
    tmp = "%s.tmp.%d" % (path, os.getpid())
    with open(tmp, "w") as fh:
        fh.write(data + "\n")
    os.replace(tmp, path)


def load_model(path):
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError("model file is not valid JSON: %s" % exc) from exc
    return model_from_dict(doc)

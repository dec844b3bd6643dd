"""Dataset ingestion and a seeded synthetic domain-shift generator.

File formats:
  * CSV features: comma-separated, no header, one sample per row.
  * Binary features: magic "PASM", u32 n, u32 d (little endian), then
    n*d little-endian float64 values in row-major order.
  * Labels: one integer per line.

The synthetic generator draws per-class Gaussian blobs for the source
domain and produces the target domain by transforming the *same* sample
points with a rotation in a seeded random plane, a translation along a
seeded random direction, and fresh isotropic noise.  Keeping the sample
points paired makes the zero-shift case exactly class-mean preserving.
"""

import os
import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, NonFinite, ParseError, RangeError

# class blobs get one elongated principal direction so rank-1 subspaces
# capture real structure rather than noise
BLOB_AXIS_STD = 3.0
BLOB_ISO_STD = 1.0
MEAN_SCALE = 2.0
# class means are redrawn until no pair is closer than this fraction of the
# expected pairwise distance, so no seed starts with two classes merged
MEAN_SEP_FRACTION = 0.9
MEAN_DRAW_TRIES = 1000


@dataclass
class LabeledDataset:
    features: np.ndarray
    labels: np.ndarray
    num_classes: int
    label_mapping: dict | None = None   # original label -> contiguous index


@dataclass
class UnlabeledDataset:
    features: np.ndarray
    true_labels: np.ndarray | None = None


@dataclass
class Shift:
    rotation: float = 0.0      # radians, applied in a seeded random plane
    translation: float = 0.0   # magnitude along a seeded random direction
    noise: float = 0.0         # stddev of isotropic target noise


@dataclass
class SynthConfig:
    num_classes: int
    dim: int
    per_class: int             # samples per class per domain
    shift: Shift = field(default_factory=Shift)
    pda_keep: tuple | None = None   # target keeps only these classes
    seed: int = 0

    def __post_init__(self):
        if self.num_classes < 1 or self.dim < 1 or self.per_class < 1:
            raise ConfigError("num_classes, dim and per_class must be >= 1")
        if self.shift.rotation < 0 or self.shift.translation < 0 or self.shift.noise < 0:
            raise ConfigError("shift magnitudes must be nonnegative")
        if self.shift.rotation > 0 and self.dim < 2:
            raise ConfigError("rotation requires dim >= 2")
        if self.pda_keep is not None:
            keep = tuple(sorted(set(int(k) for k in self.pda_keep)))
            if not keep:
                raise ConfigError("pda_keep must be nonempty when given")
            if keep[0] < 0 or keep[-1] >= self.num_classes:
                raise ConfigError("pda_keep classes outside {0..%d}"
                                  % (self.num_classes - 1))
            object.__setattr__(self, "pda_keep", keep)


def _validate_matrix(X, path):
    if X.size == 0:
        raise ParseError("%s: no rows" % path)
    if not np.isfinite(X).all():
        raise NonFinite("%s: non-finite value" % path)
    return X


def load_features(path, fmt="csv"):
    """Load a feature matrix from a CSV or binary file."""
    if fmt == "csv":
        rows = []
        arity = None
        with open(path) as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                parts = line.split(",")
                if arity is None:
                    arity = len(parts)
                elif len(parts) != arity:
                    raise ParseError("%s:%d: expected %d fields, got %d"
                                     % (path, lineno, arity, len(parts)))
                try:
                    rows.append([float(p) for p in parts])
                except ValueError as exc:
                    raise ParseError("%s:%d: %s" % (path, lineno, exc)) from exc
        if not rows:
            raise ParseError("%s: no rows" % path)
        return _validate_matrix(np.asarray(rows, dtype=float), path)
    if fmt == "bin":
        with open(path, "rb") as fh:
            blob = fh.read()
        if len(blob) < 12 or blob[:4] != b"PASM":
            raise ParseError("%s: bad magic (expected PASM)" % path)
        n, d = struct.unpack("<II", blob[4:12])
        expected = 12 + n * d * 8
        if len(blob) != expected:
            raise ParseError("%s: expected %d bytes, got %d"
                             % (path, expected, len(blob)))
        X = np.frombuffer(blob[12:], dtype="<f8").reshape(n, d).copy()
        return _validate_matrix(X, path)
    raise ConfigError("unknown feature format %r" % (fmt,))


def save_features(path, X, fmt="csv"):
    """Write a feature matrix; CSV floats use repr so values round-trip exactly."""
    X = np.asarray(X, dtype=float)
    if fmt == "csv":
        lines = [",".join(repr(float(v)) for v in row) for row in X]
        atomic_write_text(path, "\n".join(lines) + "\n")
    elif fmt == "bin":
        header = struct.pack("<4sII", b"PASM", X.shape[0], X.shape[1])
        atomic_write_bytes(path, header + X.astype("<f8").tobytes(order="C"))
    else:
        raise ConfigError("unknown feature format %r" % (fmt,))


def load_labels(path):
    """Load raw integer labels, one per line; negatives are rejected."""
    out = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            token = line.strip()
            if not token:
                raise RangeError("%s:%d: missing label" % (path, lineno))
            try:
                value = int(token)
            except ValueError as exc:
                raise ParseError("%s:%d: %s" % (path, lineno, exc)) from exc
            if value < 0:
                raise RangeError("%s:%d: negative label %d" % (path, lineno, value))
            out.append(value)
    if not out:
        raise RangeError("%s: no labels" % path)
    return np.asarray(out, dtype=np.int64)


def save_labels(path, labels):
    atomic_write_text(path, "\n".join(str(int(v)) for v in labels) + "\n")


def load_labeled(feature_path, label_path, fmt="csv"):
    """Load features plus labels, remapping labels to contiguous 0-based indices.

    The original-to-contiguous mapping is kept on the returned dataset.
    """
    X = load_features(feature_path, fmt)
    raw = load_labels(label_path)
    if raw.shape[0] != X.shape[0]:
        raise RangeError("%s: %d labels for %d feature rows"
                         % (label_path, raw.shape[0], X.shape[0]))
    classes = np.unique(raw)
    mapping = {int(c): i for i, c in enumerate(classes)}
    labels = np.searchsorted(classes, raw)
    return LabeledDataset(features=X, labels=labels, num_classes=classes.size,
                          label_mapping=mapping)


def _draw_separated_means(rng, K, d):
    # accept the first draw whose closest pair clears the floor; if the
    # floor is unreachable (many classes in few dims), keep the most
    # separated draw seen, so generation never fails and stays seeded
    floor = MEAN_SEP_FRACTION * MEAN_SCALE * np.sqrt(2.0 * d)
    best, best_sep = None, -1.0
    for _ in range(MEAN_DRAW_TRIES):
        means = rng.normal(scale=MEAN_SCALE, size=(K, d))
        if K == 1:
            return means
        diffs = means[:, None, :] - means[None, :, :]
        dist = np.sqrt((diffs ** 2).sum(axis=2))
        sep = float(dist[np.triu_indices(K, k=1)].min())
        if sep >= floor:
            return means
        if sep > best_sep:
            best, best_sep = means, sep
    return best


def _rotation_matrix(dim, angle, rng):
    """Rotation by `angle` in the plane of two seeded random directions."""
    u1 = rng.normal(size=dim)
    u1 /= np.linalg.norm(u1)
    u2 = rng.normal(size=dim)
    u2 -= (u2 @ u1) * u1
    u2 /= np.linalg.norm(u2)
    eye = np.eye(dim)
    return (eye
            + (np.cos(angle) - 1.0) * (np.outer(u1, u1) + np.outer(u2, u2))
            + np.sin(angle) * (np.outer(u2, u1) - np.outer(u1, u2)))


def synth_shifted_pair(cfg):
    """Generate a (source, target) dataset pair under a controlled shift.

    Fully deterministic per seed.  With pda_keep set, the target contains
    only the kept classes while the source keeps all of them.
    """
    if not isinstance(cfg, SynthConfig):
        raise ConfigError("expected a SynthConfig")
    rng = np.random.default_rng(cfg.seed)
    K, d, n_c = cfg.num_classes, cfg.dim, cfg.per_class

    means = _draw_separated_means(rng, K, d)
    axes = rng.normal(size=(K, d))
    axes /= np.linalg.norm(axes, axis=1, keepdims=True)

    rot = None
    if cfg.shift.rotation > 0:
        rot = _rotation_matrix(d, cfg.shift.rotation, rng)
    offset = np.zeros(d)
    if cfg.shift.translation > 0:
        direction = rng.normal(size=d)
        direction /= np.linalg.norm(direction)
        offset = cfg.shift.translation * direction

    keep = cfg.pda_keep if cfg.pda_keep is not None else tuple(range(K))

    src_blocks, src_labels = [], []
    tgt_blocks, tgt_labels = [], []
    for k in range(K):
        along = rng.normal(scale=BLOB_AXIS_STD, size=(n_c, 1))
        around = rng.normal(scale=BLOB_ISO_STD, size=(n_c, d))
        block = means[k] + along * axes[k] + around
        src_blocks.append(block)
        src_labels.append(np.full(n_c, k, dtype=np.int64))
        if k in keep:
            moved = block if rot is None else block @ rot.T
            if cfg.shift.translation > 0:
                moved = moved + offset
            if cfg.shift.noise > 0:
                moved = moved + rng.normal(scale=cfg.shift.noise, size=(n_c, d))
            tgt_blocks.append(moved)
            tgt_labels.append(np.full(n_c, k, dtype=np.int64))

    X_s = np.vstack(src_blocks)
    y_s = np.concatenate(src_labels)
    X_t = np.vstack(tgt_blocks)
    y_t = np.concatenate(tgt_labels)
    perm = rng.permutation(X_t.shape[0])
    X_t, y_t = X_t[perm], y_t[perm]

    source = LabeledDataset(features=X_s, labels=y_s, num_classes=K)
    target = UnlabeledDataset(features=X_t, true_labels=y_t)
    return source, target


def atomic_write_text(path, text):
    atomic_write_bytes(path, text.encode())


def atomic_write_bytes(path, data):
    tmp = "%s.tmp.%d" % (path, os.getpid())
    with open(tmp, "wb") as fh:
        fh.write(data)
    os.replace(tmp, path)

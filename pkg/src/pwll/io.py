"""Feature-file formats (CSV and binary) and dataset sidecars.

Binary layout, little-endian: magic "PWLL", u32 N, u32 d, then N*d float64
row-major. CSV is one row per point with d feature columns and an optional
trailing integer label column. A dataset on disk is a feature file plus a
JSON sidecar (name, C, cluster map, seed); the label column, when present,
carries the cluster id of each point.
"""

import json
import struct
from pathlib import Path

import numpy as np

from .datasets import Dataset

__all__ = ["read_features_csv", "write_features_csv", "read_features_binary",
           "write_features_binary", "write_dataset", "read_dataset"]

_MAGIC = b"PWLL"


def write_features_csv(path, features, labels=None):
    """Write features (and an optional trailing integer label column) as CSV."""
    X = np.asarray(features, dtype=np.float64)
    with open(path, "w", encoding="ascii") as f:
        for i in range(X.shape[0]):
            row = ",".join(repr(float(v)) for v in X[i])
            if labels is not None:
                row += f",{int(labels[i])}"
            f.write(row + "\n")


def read_features_csv(path, has_labels="auto"):
    """Read a CSV feature file.

    Parameters
    ----------
    path : str or Path
    has_labels : bool or "auto" (optional)
        Whether the last column is an integer label column. "auto" treats it
        as labels when every entry in it is integral.

    Returns
    -------
    features : numpy array (N x d)
    labels : numpy array (N,) of int, or None
    """
    data = np.loadtxt(path, delimiter=",", ndmin=2)
    if has_labels == "auto":
        last = data[:, -1]
        has_labels = data.shape[1] > 1 and bool(np.all(last == np.round(last)))
    if has_labels:
        return data[:, :-1], data[:, -1].astype(np.int64)
    return data, None


def write_features_binary(path, features):
    X = np.ascontiguousarray(features, dtype=np.float64)
    n, d = X.shape
    with open(path, "wb") as f:
        f.write(_MAGIC)
        f.write(struct.pack("<II", n, d))
        f.write(X.astype("<f8").tobytes())


def read_features_binary(path):
    with open(path, "rb") as f:
        magic = f.read(4)
        if magic != _MAGIC:
            raise ValueError(f"bad magic {magic!r}, expected {_MAGIC!r}")
        n, d = struct.unpack("<II", f.read(8))
        X = np.frombuffer(f.read(n * d * 8), dtype="<f8")
        if X.size != n * d:
            raise ValueError("truncated feature payload")
    return X.reshape(n, d).astype(np.float64)


def _sidecar_path(feature_path):
    return Path(feature_path).with_suffix(".json")


def write_dataset(feature_path, dataset, fmt="csv", seed=None):
    """Write a dataset as a feature file plus JSON sidecar.

    The label column (CSV) or sidecar list (binary) holds cluster ids; the
    sidecar's cluster map recovers each point's class.
    """
    feature_path = Path(feature_path)
    cluster_map = {}
    for cid in np.unique(dataset.cluster_ids):
        cluster_map[int(cid)] = int(dataset.true_labels[dataset.cluster_ids == cid][0])
    sidecar = {
        "name": dataset.name,
        "n_classes": dataset.n_classes,
        "cluster_map": {str(k): v for k, v in cluster_map.items()},
        "seed": seed,
        "format": fmt,
    }
    if fmt == "csv":
        write_features_csv(feature_path, dataset.features, labels=dataset.cluster_ids)
    elif fmt == "binary":
        write_features_binary(feature_path, dataset.features)
        sidecar["cluster_ids"] = [int(c) for c in dataset.cluster_ids]
    else:
        raise ValueError(f"unknown format {fmt!r}")
    with open(_sidecar_path(feature_path), "w", encoding="ascii") as f:
        json.dump(sidecar, f, indent=2, sort_keys=True)
        f.write("\n")


def read_dataset(feature_path):
    """Read a dataset written by `write_dataset`."""
    feature_path = Path(feature_path)
    with open(_sidecar_path(feature_path), encoding="ascii") as f:
        sidecar = json.load(f)
    if sidecar["format"] == "csv":
        features, cluster_ids = read_features_csv(feature_path, has_labels=True)
    else:
        features = read_features_binary(feature_path)
        cluster_ids = np.asarray(sidecar["cluster_ids"], dtype=np.int64)
    cluster_map = {int(k): int(v) for k, v in sidecar["cluster_map"].items()}
    labels = np.array([cluster_map[int(c)] for c in cluster_ids], dtype=np.int64)
    return Dataset(features=features, true_labels=labels,
                   cluster_ids=cluster_ids, name=sidecar["name"])

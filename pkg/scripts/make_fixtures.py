#!/usr/bin/env python3
"""Regenerate the shipped desk-scale embedding fixture under data/.

The fixture stands in for an externally produced embedding: a 1500-point,
8-dimensional anisotropic Gaussian mixture with 10 clusters, relabeled mod 3
so each class spans several clusters. Output is deterministic.
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from pwll.datasets import gen_embedding_mixture, relabel_mod_k
from pwll.io import write_dataset

SEED = 42


def main():
    out_dir = Path(__file__).resolve().parents[1] / "data"
    out_dir.mkdir(exist_ok=True)
    dataset = relabel_mod_k(gen_embedding_mixture(SEED, n_points=1500,
                                                  n_clusters=10, dim=8), 3)
    write_dataset(out_dir / "embedding_smoke.pwll", dataset, fmt="binary",
                  seed=SEED)
    print(f"wrote {dataset.n_points} x {dataset.features.shape[1]} fixture "
          f"({dataset.n_classes} classes, {dataset.n_clusters} clusters)")


if __name__ == "__main__":
    main()

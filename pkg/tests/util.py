"""Shared samplers for the randomized suites."""

from __future__ import annotations

import numpy as np

from einext.algebra import StructureTensor


def random_sparse_tensor(rng, max_dim: int = 5):
    """Random sparse frame data: entries in [-1, 1], eigenvalues int in [-3, 3]."""
    n = int(rng.integers(2, max_dim + 1))
    entries = {}
    for _ in range(int(rng.integers(1, n + 2))):
        i, j = sorted(rng.choice(np.arange(1, n + 1), size=2, replace=False).tolist())
        k = int(rng.integers(1, n + 1))
        entries[(int(i), int(j), int(k))] = float(rng.uniform(-1, 1))
    p = [int(x) for x in rng.integers(-3, 4, size=n)]
    return StructureTensor(n, entries), p


def random_lie_tensor(rng, max_dim: int = 4):
    """Random structure constants satisfying the Jacobi identity exactly.

    Draws from three families that are Lie algebras by construction for any
    values: abelian, two-step nilpotent (all brackets land in a central
    slice), and a single generator acting linearly on an abelian ideal.
    """
    n = int(rng.integers(2, max_dim + 1))
    family = int(rng.integers(0, 3))
    entries = {}
    if family == 1 and n >= 3:
        center = int(rng.integers(1, n - 1))
        for _ in range(int(rng.integers(1, n + 1))):
            i, j = sorted(
                rng.choice(np.arange(1, n - center + 1), size=2, replace=False).tolist()
            ) if n - center >= 2 else (0, 0)
            if i == 0:
                continue
            k = int(rng.integers(n - center + 1, n + 1))
            entries[(int(i), int(j), int(k))] = float(rng.uniform(-1, 1))
    elif family == 2:
        for i in range(1, n):
            for j in range(1, n):
                if i != j and rng.uniform() < 0.4:
                    entries[(n, i, j)] = float(rng.uniform(-1, 1))
                elif i == j and rng.uniform() < 0.4:
                    entries[(n, i, i)] = float(rng.uniform(-1, 1))
    return StructureTensor(n, entries, lie=True), [int(x) for x in rng.integers(-3, 4, size=n)]

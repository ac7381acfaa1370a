"""Reference computations kept deliberately naive and independent of the package code paths."""

import math

import numpy as np


def triple_loop_matmul(a, b):
    n, m = len(a), len(b[0])
    inner = len(b)
    out = [[0.0] * m for _ in range(n)]
    for i in range(n):
        for j in range(m):
            acc = 0.0
            for t in range(inner):
                acc += a[i][t] * b[t][j]
            out[i][j] = acc
    return np.array(out)


def numpy_eigh_desc(a):
    """LAPACK symmetric eigendecomposition, sorted descending."""
    values, vectors = np.linalg.eigh(a)
    return values[::-1], vectors[:, ::-1]


def align_signs(reference, candidate):
    """Flip candidate columns to best match the reference columns."""
    out = candidate.copy()
    for j in range(out.shape[1]):
        if reference[:, j] @ out[:, j] < 0:
            out[:, j] *= -1
    return out


def explicit_inverse_generalized_values(s_b, s_w):
    values = np.linalg.eigvals(np.linalg.inv(s_w) @ s_b)
    return np.sort(values.real)[::-1]


def literal_scatters(z, labels):
    """S_W and S_B from the element-by-element definitions, pure Python loops."""
    d, p = len(z), len(z[0])
    names = sorted(set(labels))
    total = [sum(z[r][i] for i in range(p)) / p for r in range(d)]
    s_w = [[0.0] * d for _ in range(d)]
    s_b = [[0.0] * d for _ in range(d)]
    for name in names:
        cols = [i for i in range(p) if labels[i] == name]
        m_i = [sum(z[r][i] for i in cols) / len(cols) for r in range(d)]
        for i in cols:
            for r in range(d):
                for c in range(d):
                    s_w[r][c] += (z[r][i] - m_i[r]) * (z[c][i] - m_i[c])
        for r in range(d):
            for c in range(d):
                s_b[r][c] += len(cols) * (m_i[r] - total[r]) * (m_i[c] - total[c])
    return np.array(s_w), np.array(s_b)


def total_scatter(z):
    centered = z - z.mean(axis=1, keepdims=True)
    return centered @ centered.T


def naive_knn(probe, exemplars, labels, k, threshold=None):
    """Full sort on (distance, index); returns (label or None, candidate)."""
    dists = []
    for i in range(exemplars.shape[1]):
        acc = 0.0
        for a, b in zip(probe, exemplars[:, i]):
            acc += (a - b) ** 2
        dists.append((math.sqrt(acc), i))
    dists.sort()
    chosen = dists[:k]
    counts = {}
    for _, i in chosen:
        counts[labels[i]] = counts.get(labels[i], 0) + 1
    best = max(counts.values())
    tied = [c for c in counts if counts[c] == best]
    nearest = {c: min(dd for dd, i in chosen if labels[i] == c) for c in tied}
    winner = sorted(tied, key=lambda c: (nearest[c], c))[0]
    min_d = dists[0][0]
    if threshold is not None and min_d > threshold:
        return None, winner
    return winner, winner

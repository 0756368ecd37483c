"""PCA over spectral vectors: Global Feature Vectors (GFVs).

With fewer samples than dimensions the basis comes from the n x n Gram matrix
of centered samples ("Gram trick"), diagonalized by a cyclic Jacobi solver.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInput, LengthMismatch

log = logging.getLogger(__name__)

JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100
EIG_ZERO_TOL = 1e-10


def _round_robin(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Tournament schedule: n-1 rounds (n even) of disjoint index pairs covering all pairs."""
    players = list(range(n)) + ([-1] if n % 2 else [])
    m = len(players)
    rounds = []
    for _ in range(m - 1):
        ps, qs = [], []
        for i in range(m // 2):
            a, b = players[i], players[m - 1 - i]
            if a >= 0 and b >= 0:
                ps.append(min(a, b))
                qs.append(max(a, b))
        rounds.append((np.array(ps, dtype=np.intp), np.array(qs, dtype=np.intp)))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def _off_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.sqrt(np.sum(off * off)))


def jacobi_eigh(matrix, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS):
    """Eigendecomposition of a real symmetric matrix by Jacobi rotations.

    Each sweep visits every off-diagonal pair once, grouped into rounds of
    disjoint pairs that are rotated together. Iterates until the off-diagonal
    Frobenius norm drops below ``tol`` times the matrix Frobenius norm.

    Returns:
        (eigenvalues, eigenvectors) with eigenvalues descending and
        eigenvectors as columns.
    """
    a = np.array(matrix, dtype=np.float64)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("matrix must be square")
    a = 0.5 * (a + a.T)
    v = np.eye(n)
    scale = float(np.linalg.norm(a))
    rounds = _round_robin(n) if n > 1 else []
    sweeps = 0
    while n > 1 and sweeps < max_sweeps and _off_norm(a) > tol * scale:
        for p, q in rounds:
            apq = a[p, q]
            active = np.abs(apq) > 0.0
            if not active.any():
                continue
            theta = np.where(active, (a[q, q] - a[p, p]) / np.where(active, 2.0 * apq, 1.0), 0.0)
            t = np.where(active, np.sign(theta) / (np.abs(theta) + np.sqrt(theta * theta + 1.0)), 0.0)
            t = np.where(active & (theta == 0.0), 1.0, t)
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            rp, rq = a[p, :].copy(), a[q, :].copy()
            a[p, :] = c[:, None] * rp - s[:, None] * rq
            a[q, :] = s[:, None] * rp + c[:, None] * rq
            cp, cq = a[:, p].copy(), a[:, q].copy()
            a[:, p] = cp * c - cq * s
            a[:, q] = cp * s + cq * c
            vp, vq = v[:, p].copy(), v[:, q].copy()
            v[:, p] = vp * c - vq * s
            v[:, q] = vp * s + vq * c
        sweeps += 1
    if sweeps == max_sweeps:
        log.warning("jacobi: no convergence after %d sweeps (off=%.3g)", sweeps, _off_norm(a))
    vals = np.diag(a).copy()
    order = np.argsort(-vals, kind="stable")
    return vals[order], v[:, order]


def _fix_signs(components: np.ndarray) -> np.ndarray:
    idx = np.argmax(np.abs(components), axis=1)
    signs = np.sign(components[np.arange(len(components)), idx])
    signs[signs == 0] = 1.0
    return components * signs[:, None]


@dataclass(frozen=True)
class PcaBasis:
    mean: np.ndarray          # (d,)
    components: np.ndarray    # (r, d), orthonormal rows
    eigenvalues: np.ndarray   # (r,), non-increasing

    @property
    def dim(self) -> int:
        return self.mean.shape[0]

    @property
    def rank(self) -> int:
        return self.components.shape[0]


def fit_pca(samples, rank: int) -> PcaBasis:
    """Fit a rank-``rank`` PCA basis to the rows of ``samples``.

    ``rank`` is clamped to ``min(d, n - 1)``. Components whose eigenvalue is
    numerically zero are dropped, so the returned rank may be smaller.
    """
    x = np.asarray(samples, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 2:
        raise ValueError("need at least 2 sample vectors")
    n, d = x.shape
    limit = min(d, n - 1)
    if rank < 1:
        raise ValueError(f"rank must be >= 1, got {rank}")
    if rank > limit:
        log.warning("pca rank %d clamped to %d", rank, limit)
        rank = limit
    mean = x.mean(axis=0)
    centered = x - mean
    if not np.any(centered):
        raise DegenerateInput("all samples identical; no variance to model")

    if n <= d:
        gram = centered @ centered.T
        vals, vecs = jacobi_eigh(gram)
        vals, vecs = vals[:rank], vecs[:, :rank]
        comps = (centered.T @ vecs).T
    else:
        cov = centered.T @ centered
        vals, vecs = jacobi_eigh(cov)
        vals, vecs = vals[:rank], vecs[:, :rank]
        comps = vecs.T.copy()
    vals = vals / (n - 1)

    zero_tol = EIG_ZERO_TOL * max(1.0, float(vals[0]))
    keep = vals > zero_tol
    if not keep.all():
        log.warning("pca: dropping %d numerically null components", int((~keep).sum()))
    vals, comps = vals[keep], comps[keep]
    if len(vals) == 0:
        raise DegenerateInput("no component with non-zero variance")
    comps = comps / np.linalg.norm(comps, axis=1, keepdims=True)
    comps = _fix_signs(comps)
    return PcaBasis(mean, comps, np.maximum(vals, 0.0))


def project(basis: PcaBasis, x) -> np.ndarray:
    """GFV(s) of ``x``; accepts one vector or a stack of rows."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != basis.dim:
        raise LengthMismatch(f"vector length {x.shape[-1]} != basis dim {basis.dim}")
    return (x - basis.mean) @ basis.components.T


def reconstruct(basis: PcaBasis, g) -> np.ndarray:
    g = np.asarray(g, dtype=np.float64)
    if g.shape[-1] != basis.rank:
        raise LengthMismatch(f"GFV length {g.shape[-1]} != basis rank {basis.rank}")
    return basis.mean + g @ basis.components

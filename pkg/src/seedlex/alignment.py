"""Linear maps between embedding spaces fitted on seed-dictionary pairs.

Three estimators are provided:

* least squares, ``W = argmin ||XW - Y||^2 + ridge ||W||^2``;
* orthogonal Procrustes, ``W = U V^T`` with ``X^T Y = U S V^T``;
* CCA, whitening both sides and taking the SVD of the whitened
  cross-covariance.  The source canonical projection is composed with the
  pseudo-inverse of the target one so that source vectors land in target
  coordinates: ``(x - mu_x) A B^+ + mu_y``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dictionary import SeedDictionary
from .embedding_store import EmbeddingSpace
from .errors import DataError, DimensionError, FormatError

METHODS = ("cca", "least_squares", "procrustes")

# Relative ridge used when fit_cca is called with ridge=None.
AUTO_RIDGE_SCALE = 1e-5
_PD_RTOL = 1e-12


class AlignmentError(DataError):
    pass


@dataclass(frozen=True)
class PairedMatrix:
    X: np.ndarray
    Y: np.ndarray
    kept_pairs: tuple
    skipped: int

    @property
    def n(self) -> int:
        return self.X.shape[0]


@dataclass(frozen=True)
class ProjectionMap:
    method: str
    W: np.ndarray
    source_mean: Optional[np.ndarray] = None
    target_mean: Optional[np.ndarray] = None
    A: Optional[np.ndarray] = None
    B: Optional[np.ndarray] = None
    correlations: Optional[np.ndarray] = None
    k: Optional[int] = None
    ridge: float = 0.0

    def __post_init__(self):
        if self.method not in METHODS:
            raise DataError(f"unknown projection method {self.method!r}")
        for name in ("W", "source_mean", "target_mean", "A", "B", "correlations"):
            value = getattr(self, name)
            if value is not None:
                arr = np.array(value, dtype=np.float64)
                arr.setflags(write=False)
                object.__setattr__(self, name, arr)

    @property
    def orthogonal(self) -> bool:
        return self.method == "procrustes"

    @property
    def source_dim(self) -> int:
        return self.W.shape[0]

    @property
    def target_dim(self) -> int:
        return self.W.shape[1]

    @property
    def centered(self) -> bool:
        return self.source_mean is not None

    def apply(self, vectors) -> np.ndarray:
        """Map source row vectors into target coordinates."""
        vectors = np.asarray(vectors, dtype=np.float64)
        if vectors.shape[-1] != self.source_dim:
            raise DimensionError(
                f"vectors have dimension {vectors.shape[-1]}, map expects {self.source_dim}"
            )
        if self.source_mean is None:
            return vectors @ self.W
        return (vectors - self.source_mean) @ self.W + self.target_mean

    def apply_shared(self, vectors, side: str = "source") -> np.ndarray:
        """Canonical-space coordinates of source (``A``) or target (``B``) vectors."""
        if self.method != "cca":
            raise AlignmentError("shared-space projection is only defined for CCA maps")
        vectors = np.asarray(vectors, dtype=np.float64)
        if side == "source":
            mat, mean = self.A, self.source_mean
        elif side == "target":
            mat, mean = self.B, self.target_mean
        else:
            raise DataError(f"side must be 'source' or 'target', got {side!r}")
        if vectors.shape[-1] != mat.shape[0]:
            raise DimensionError(f"vectors have dimension {vectors.shape[-1]}, expected {mat.shape[0]}")
        return (vectors - mean) @ mat


def pair_matrices(dictionary: SeedDictionary, source: EmbeddingSpace, target: EmbeddingSpace) -> PairedMatrix:
    src_idx, tgt_idx, kept = [], [], []
    skipped = 0
    for src, tgt in dictionary.pairs:
        i, j = source.get(src), target.get(tgt)
        if i is None or j is None:
            skipped += 1
            continue
        src_idx.append(i)
        tgt_idx.append(j)
        kept.append((src, tgt))
    if not kept:
        raise AlignmentError(f"no in-vocabulary pairs ({skipped} pairs skipped as out-of-vocabulary)")
    return PairedMatrix(source.vectors[src_idx], target.vectors[tgt_idx], tuple(kept), skipped)


def _fix_signs(U: np.ndarray, V: np.ndarray):
    """Flip singular-vector pairs so the largest-magnitude entry of each U column is positive."""
    if U.shape[1] == 0:
        return U, V
    rows = np.argmax(np.abs(U), axis=0)
    signs = np.sign(U[rows, np.arange(U.shape[1])])
    signs[signs == 0] = 1.0
    return U * signs, V * signs


def _center(pm: PairedMatrix, center: bool):
    if not center:
        return pm.X, pm.Y, None, None
    mx, my = pm.X.mean(axis=0), pm.Y.mean(axis=0)
    return pm.X - mx, pm.Y - my, mx, my


def fit_least_squares(pm: PairedMatrix, ridge: float = 0.0, center: bool = False) -> ProjectionMap:
    """Solve the normal equations ``(X^T X + ridge I) W = X^T Y``."""
    if ridge < 0:
        raise DataError("ridge must be non-negative")
    X, Y, mx, my = _center(pm, center)
    d = X.shape[1]
    gram = X.T @ X + ridge * np.eye(d)
    cond = np.linalg.cond(gram)
    if not np.isfinite(cond) or cond * np.finfo(np.float64).eps * d > 1e-2:
        raise AlignmentError(
            f"normal equations are singular or ill-conditioned (condition number {cond:.3g}); "
            "use a positive ridge"
        )
    W = np.linalg.solve(gram, X.T @ Y)
    return ProjectionMap("least_squares", W, source_mean=mx, target_mean=my, ridge=float(ridge))


def fit_procrustes(pm: PairedMatrix, center: bool = False) -> ProjectionMap:
    """Best orthogonal ``W`` minimizing ``||XW - Y||_F``."""
    d_s, d_t = pm.X.shape[1], pm.Y.shape[1]
    if d_s != d_t:
        raise DimensionError(f"Procrustes needs equal dimensions, got source {d_s} and target {d_t}")
    if pm.n < d_s:
        warnings.warn(f"only {pm.n} pairs for dimension {d_s}; the rotation is underdetermined", stacklevel=2)
    X, Y, mx, my = _center(pm, center)
    M = X.T @ Y
    U, s, Vt = np.linalg.svd(M)
    if s[-1] <= s[0] * d_s * np.finfo(np.float64).eps:
        warnings.warn("cross-covariance is rank deficient; the Procrustes solution is not unique", stacklevel=2)
    U, V = _fix_signs(U, Vt.T)
    W = U @ V.T
    return ProjectionMap("procrustes", W, source_mean=mx, target_mean=my)


def _inverse_sqrt(C: np.ndarray, name: str) -> np.ndarray:
    evals, evecs = np.linalg.eigh(C)
    top = max(float(np.max(np.abs(evals))), np.finfo(np.float64).tiny)
    if evals[0] <= _PD_RTOL * top:
        raise AlignmentError(
            f"{name} covariance is not positive definite (smallest eigenvalue {evals[0]:.3g}); "
            "use a larger ridge"
        )
    return (evecs / np.sqrt(evals)) @ evecs.T


def auto_ridge(pm: PairedMatrix) -> float:
    """``1e-5`` times the mean diagonal of the two centered covariances."""
    Xc = pm.X - pm.X.mean(axis=0)
    Yc = pm.Y - pm.Y.mean(axis=0)
    mean_diag = 0.5 * ((Xc * Xc).sum(axis=0).mean() + (Yc * Yc).sum(axis=0).mean()) / pm.n
    return AUTO_RIDGE_SCALE * float(mean_diag)


def fit_cca(pm: PairedMatrix, keep_ratio: float = 1.0, ridge: Optional[float] = None) -> ProjectionMap:
    if pm.n < 2:
        raise AlignmentError("CCA needs at least 2 pairs")
    if not 0.0 < keep_ratio <= 1.0:
        raise DataError("keep_ratio must lie in (0, 1]")
    if ridge is None:
        ridge = auto_ridge(pm)
    if ridge < 0:
        raise DataError("ridge must be non-negative")
    n = pm.n
    mx, my = pm.X.mean(axis=0), pm.Y.mean(axis=0)
    Xc, Yc = pm.X - mx, pm.Y - my
    d_s, d_t = Xc.shape[1], Yc.shape[1]
    Cxx = Xc.T @ Xc / n + ridge * np.eye(d_s)
    Cyy = Yc.T @ Yc / n + ridge * np.eye(d_t)
    Cxy = Xc.T @ Yc / n
    Sxx = _inverse_sqrt(Cxx, "source")
    Syy = _inverse_sqrt(Cyy, "target")
    U, s, Vt = np.linalg.svd(Sxx @ Cxy @ Syy, full_matrices=False)
    U, V = _fix_signs(U, Vt.T)
    k = math.ceil(keep_ratio * min(d_s, d_t) - 1e-9)
    A = Sxx @ U[:, :k]
    B = Syy @ V[:, :k]
    W = A @ np.linalg.pinv(B)
    return ProjectionMap(
        "cca", W, source_mean=mx, target_mean=my, A=A, B=B,
        correlations=s[:k], k=k, ridge=float(ridge),
    )


def fit_map(pm: PairedMatrix, method: str, *, ridge: Optional[float] = None,
            keep_ratio: float = 1.0, center: bool = False) -> ProjectionMap:
    if method == "cca":
        return fit_cca(pm, keep_ratio=keep_ratio, ridge=ridge)
    if method == "least_squares":
        return fit_least_squares(pm, ridge=0.0 if ridge is None else ridge, center=center)
    if method == "procrustes":
        return fit_procrustes(pm, center=center)
    raise DataError(f"unknown projection method {method!r}")


def project_space(source: EmbeddingSpace, pmap: ProjectionMap, shared_space: bool = False,
                  side: str = "source") -> EmbeddingSpace:
    """Transform every vector of ``source``; vocabulary and frequencies are kept.

    With ``shared_space`` (CCA only) the result lives in canonical coordinates
    instead, ``side`` choosing the source (``A``) or target (``B``) projection.
    """
    if shared_space:
        vectors = pmap.apply_shared(source.vectors, side=side)
    else:
        vectors = pmap.apply(source.vectors)
    return source.replace(vectors=vectors)


def orthogonality_error(W: np.ndarray) -> float:
    W = np.asarray(W)
    return float(np.linalg.norm(W.T @ W - np.eye(W.shape[1])))


# -- serialization ---------------------------------------------------------

_MAGIC = "seedlex-projection-map 1"


def _write_matrix(fh, name, M):
    M = np.atleast_2d(M)
    fh.write(f"matrix {name} {M.shape[0]} {M.shape[1]}\n")
    for row in M.tolist():
        fh.write(" ".join(repr(float(x)) for x in row) + "\n")


def _write_vector(fh, name, v):
    fh.write(f"vector {name} {len(v)}\n")
    fh.write(" ".join(repr(float(x)) for x in v) + "\n")


def save_map(pmap: ProjectionMap, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(_MAGIC + "\n")
        fh.write(f"method {pmap.method}\n")
        fh.write(f"dims {pmap.source_dim} {pmap.target_dim}\n")
        fh.write(f"ridge {pmap.ridge!r}\n")
        if pmap.k is not None:
            fh.write(f"k {pmap.k}\n")
        _write_matrix(fh, "W", pmap.W)
        for name in ("A", "B"):
            if getattr(pmap, name) is not None:
                _write_matrix(fh, name, getattr(pmap, name))
        for name in ("correlations", "source_mean", "target_mean"):
            if getattr(pmap, name) is not None:
                _write_vector(fh, name, getattr(pmap, name))


def load_map(path) -> ProjectionMap:
    with open(path, encoding="utf-8") as fh:
        lines = [ln.rstrip("\r\n") for ln in fh]
    if not lines or lines[0] != _MAGIC:
        raise FormatError("not a projection map file", path, 1)
    fields = {}
    arrays = {}
    i = 1
    try:
        while i < len(lines):
            parts = lines[i].split()
            i += 1
            if not parts:
                continue
            key = parts[0]
            if key == "matrix":
                name, rows, cols = parts[1], int(parts[2]), int(parts[3])
                data = [[float(x) for x in lines[i + r].split()] for r in range(rows)]
                M = np.array(data, dtype=np.float64).reshape(rows, cols)
                arrays[name] = M
                i += rows
            elif key == "vector":
                name, length = parts[1], int(parts[2])
                v = np.array([float(x) for x in lines[i].split()], dtype=np.float64) if length else np.zeros(0)
                if v.shape != (length,):
                    raise FormatError(f"vector {name} has {v.size} entries, expected {length}", path, i + 1)
                arrays[name] = v
                i += 1
            else:
                fields[key] = parts[1:]
    except (IndexError, ValueError) as exc:
        raise FormatError(f"malformed projection map: {exc}", path, i) from None
    if "W" not in arrays or "method" not in fields:
        raise FormatError("projection map lacks method or W", path)
    d_s, d_t = (int(x) for x in fields["dims"])
    if arrays["W"].shape != (d_s, d_t):
        raise FormatError(f"W has shape {arrays['W'].shape}, header says {(d_s, d_t)}", path)
    return ProjectionMap(
        fields["method"][0],
        arrays["W"],
        source_mean=arrays.get("source_mean"),
        target_mean=arrays.get("target_mean"),
        A=arrays.get("A"),
        B=arrays.get("B"),
        correlations=arrays.get("correlations"),
        k=int(fields["k"][0]) if "k" in fields else None,
        ridge=float(fields["ridge"][0]) if "ridge" in fields else 0.0,
    )

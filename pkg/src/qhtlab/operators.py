"""Dense Hermitian operator algebra.

Validation, spectral decomposition with eigenvalue clustering, functional
calculus, positive parts and support projectors, trace norms.  Everything is
dense and immutable; the hard dimension cap keeps the package at desk scale.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import (
    DimensionCap,
    DomainError,
    EigenSolverFailure,
    NotHermitian,
    NotPSD,
    TraceNotOne,
)

HERMITIAN_ATOL = 1e-12
TRACE_ATOL = 1e-12
PSD_ATOL = 1e-12
SUPPORT_TOL = 1e-12
DEFAULT_FAITHFUL_TOL = 1e-12
DEFAULT_CLUSTER_TOL = 1e-10
DIM_CAP = 4096


def _freeze(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class HermitianOperator:
    """A dense self-adjoint operator on a finite-dimensional complex space."""

    entries: np.ndarray

    def __post_init__(self):
        a = np.array(self.entries, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise NotHermitian(f"expected a square matrix, got shape {a.shape}")
        if a.shape[0] > DIM_CAP:
            raise DimensionCap(
                f"dimension {a.shape[0]} exceeds the dense cap {DIM_CAP}"
            )
        if not np.allclose(a, a.conj().T, rtol=0.0, atol=HERMITIAN_ATOL):
            raise NotHermitian("matrix is not Hermitian within 1e-12")
        # exact symmetrization so downstream eigensolves see a true Hermitian input
        a = (a + a.conj().T) / 2.0
        object.__setattr__(self, "entries", _freeze(a))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def trace(self) -> float:
        return float(self.entries.trace().real)

    def norm(self) -> float:
        """Operator (spectral) norm."""
        return float(np.abs(_eigh(self.entries)[0]).max()) if self.dim else 0.0


def hermitian(entries) -> HermitianOperator:
    """Wrap an array-like as a validated HermitianOperator."""
    return HermitianOperator(np.asarray(entries, dtype=complex))


def as_entries(op) -> np.ndarray:
    """Accept HermitianOperator, DensityMatrix, TestOperator or array-like."""
    if isinstance(op, HermitianOperator):
        return op.entries
    if isinstance(op, (DensityMatrix, TestOperator)):
        return op.op.entries
    return hermitian(op).entries


@dataclass(frozen=True)
class DensityMatrix:
    """A validated quantum state (PSD, unit trace)."""

    op: HermitianOperator
    faithful: bool
    min_eig: float

    @property
    def dim(self) -> int:
        return self.op.dim

    @property
    def entries(self) -> np.ndarray:
        return self.op.entries


@dataclass(frozen=True)
class TestOperator:
    """An operator T with 0 <= T <= I, i.e. a two-outcome POVM element."""

    op: HermitianOperator
    kind: str = "general"  # "projector" | "general"
    _checked: bool = False

    def __post_init__(self):
        if self.kind not in ("projector", "general"):
            raise ValueError(f"unknown test kind {self.kind!r}")
        if not self._checked:
            from .errors import InvalidTest

            w = _eigh(self.op.entries)[0]
            if w.min() < -1e-12 or w.max() > 1.0 + 1e-12:
                raise InvalidTest(
                    f"test eigenvalues in [{w.min():.3e}, {w.max():.3e}] "
                    "leave [0, 1]"
                )

    @property
    def entries(self) -> np.ndarray:
        return self.op.entries

    @property
    def dim(self) -> int:
        return self.op.dim


@dataclass(frozen=True)
class SpectralDecomposition:
    """Clustered eigendecomposition: distinct eigenvalues with projectors."""

    eigenvalues: tuple
    projectors: tuple
    multiplicities: tuple

    def reconstruct(self) -> np.ndarray:
        dim = self.projectors[0].dim
        out = np.zeros((dim, dim), dtype=complex)
        for lam, proj in zip(self.eigenvalues, self.projectors):
            out += lam * proj.entries
        return out


def _eigh(a: np.ndarray):
    try:
        return np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - rare
        raise EigenSolverFailure(str(exc)) from exc


def _cluster_bounds(w: np.ndarray, tol: float) -> list:
    """Slice boundaries of eigenvalue clusters in an ascending spectrum."""
    if len(w) == 0:
        return []
    starts = [0]
    for i in range(1, len(w)):
        if w[i] - w[i - 1] > tol:
            starts.append(i)
    starts.append(len(w))
    return [(starts[k], starts[k + 1]) for k in range(len(starts) - 1)]


def clustered_eigh(a: np.ndarray, cluster_tol: float = DEFAULT_CLUSTER_TOL):
    """Eigendecomposition with near-degenerate eigenvalues merged.

    Returns (values, multiplicities, vectors, bounds) where values are the
    cluster means, vectors is the full eigenvector matrix and bounds are the
    (start, stop) column ranges of each cluster.
    """
    w, v = _eigh(a)
    scale = max(1.0, float(np.abs(w).max())) if len(w) else 1.0
    bounds = _cluster_bounds(w, cluster_tol * scale)
    values = np.array([w[s:e].mean() for s, e in bounds])
    mults = np.array([e - s for s, e in bounds], dtype=int)
    return values, mults, v, bounds


def _zero_tol(w: np.ndarray, cluster_tol: float) -> float:
    scale = max(1.0, float(np.abs(w).max())) if len(w) else 1.0
    return cluster_tol * scale


def validate_density(
    M: HermitianOperator, faithfulness_tol: float = DEFAULT_FAITHFUL_TOL
) -> DensityMatrix:
    """Check PSD and unit trace; flag faithfulness by the minimum eigenvalue."""
    op = M if isinstance(M, HermitianOperator) else hermitian(M)
    w = _eigh(op.entries)[0]
    min_eig = float(w.min())
    if min_eig < -PSD_ATOL:
        raise NotPSD(f"minimum eigenvalue {min_eig:.3e} < -1e-12")
    tr = op.trace()
    if abs(tr - 1.0) > TRACE_ATOL:
        raise TraceNotOne(f"trace {tr!r} differs from 1 by more than 1e-12")
    return DensityMatrix(op=op, faithful=min_eig > faithfulness_tol, min_eig=min_eig)


def spectral_decompose(
    H, cluster_tol: float = DEFAULT_CLUSTER_TOL
) -> SpectralDecomposition:
    """Clustered spectral decomposition with explicit orthogonal projectors.

    Two raw eigenvalues merge iff they are within cluster_tol * max(1, ||H||).
    """
    a = as_entries(H)
    values, mults, v, bounds = clustered_eigh(a, cluster_tol)
    projectors = []
    for s, e in bounds:
        block = v[:, s:e]
        p = block @ block.conj().T
        projectors.append(HermitianOperator(p))
    return SpectralDecomposition(
        eigenvalues=tuple(float(x) for x in values),
        projectors=tuple(projectors),
        multiplicities=tuple(int(m) for m in mults),
    )


def positive_part(H, cluster_tol: float = DEFAULT_CLUSTER_TOL) -> HermitianOperator:
    """Sum of lambda * P_lambda over strictly positive clustered eigenvalues.

    Eigenvalues within the clustering tolerance of zero count as zero.
    """
    a = as_entries(H)
    w, v = _eigh(a)
    keep = w > _zero_tol(w, cluster_tol)
    if not keep.any():
        return hermitian(np.zeros_like(a))
    vk = v[:, keep]
    out = (vk * w[keep]) @ vk.conj().T
    return HermitianOperator(out)


def positive_support_projector(
    H, cluster_tol: float = DEFAULT_CLUSTER_TOL
) -> TestOperator:
    """Orthogonal projection onto the span of strictly positive eigenspaces."""
    a = as_entries(H)
    w, v = _eigh(a)
    keep = w > _zero_tol(w, cluster_tol)
    vk = v[:, keep]
    proj = vk @ vk.conj().T
    return TestOperator(op=HermitianOperator(proj), kind="projector", _checked=True)


def matrix_function(
    H, f: Callable[[float], float], cluster_tol: float = DEFAULT_CLUSTER_TOL
) -> HermitianOperator:
    """Apply a real scalar function through the clustered spectral calculus."""
    a = as_entries(H)
    values, _, v, bounds = clustered_eigh(a, cluster_tol)
    fvals = np.empty(len(values))
    for i, lam in enumerate(values):
        try:
            y = float(f(float(lam)))
        except (ValueError, ZeroDivisionError, OverflowError) as exc:
            raise DomainError(f"f undefined at eigenvalue {lam!r}: {exc}") from exc
        if not np.isfinite(y):
            raise DomainError(f"f({lam!r}) is not finite")
        fvals[i] = y
    diag = np.empty(a.shape[0])
    for (s, e), y in zip(bounds, fvals):
        diag[s:e] = y
    out = (v * diag) @ v.conj().T
    return HermitianOperator(out)


def trace_norm(H) -> float:
    """Sum of absolute eigenvalues (Schatten-1 norm for Hermitian input)."""
    a = as_entries(H)
    w = _eigh(a)[0]
    return float(np.abs(w).sum())


def frac_power_eigs(w: np.ndarray, s: float, zero_tol: float = SUPPORT_TOL):
    """Eigenvalues of a fractional power of a PSD spectrum.

    Convention: 0**0 = 1 (so A**0 = I) and 0**s = 0 for s > 0.  Negative
    exponents require a strictly positive spectrum.
    """
    w = np.where(np.abs(w) <= zero_tol, 0.0, w)
    if w.min() < 0:
        raise NotPSD(f"negative eigenvalue {w.min():.3e} under fractional power")
    if s == 0.0:
        return np.ones_like(w)
    if s < 0 and w.min() <= zero_tol:
        raise DomainError(
            "negative fractional power of a singular operator is undefined"
        )
    out = np.zeros_like(w)
    pos = w > 0
    out[pos] = np.exp(s * np.log(w[pos]))
    return out

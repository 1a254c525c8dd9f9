"""Scalar information quantities for pairs of positive operators.

The central object is psi_s = log Tr(A^s B^(1-s)); relative entropy and the
information variance are its first and second derivatives at s = 1, which the
derivative-identity check verifies by finite differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .operators import (
    SUPPORT_TOL,
    as_entries,
    clustered_eigh,
    frac_power_eigs,
    _eigh,
)

UNDERFLOW = 1e-300
POS_INF = math.inf
NEG_INF = -math.inf


def _overlap_matrix(a: np.ndarray, b: np.ndarray):
    """Eigenvalues of a and b plus |<u_i, v_j>|^2 cross overlaps."""
    wa, va = _eigh(a)
    wb, vb = _eigh(b)
    c = va.conj().T @ vb
    return wa, wb, (c.real**2 + c.imag**2)


def power_product_trace(A, B, s: float) -> float:
    """Tr(A^s B^(1-s)) for PSD A, B via the joint spectral calculus."""
    wa, wb, o2 = _overlap_matrix(as_entries(A), as_entries(B))
    fa = frac_power_eigs(wa, s)
    fb = frac_power_eigs(wb, 1.0 - s)
    return float(np.einsum("i,ij,j->", fa, o2, fb))


def psi_s(A, B, s: float) -> float:
    """log Tr(A^s B^(1-s)); -inf when the supports are orthogonal.

    For s outside [0, 1] both operators must be strictly positive.
    """
    tr = power_product_trace(A, B, s)
    if tr <= UNDERFLOW:
        return NEG_INF
    return math.log(tr)


def _support_leak(wa: np.ndarray, o2: np.ndarray, wb: np.ndarray) -> float:
    """Mass of the first operator outside the support of the second."""
    ker = wb <= SUPPORT_TOL
    if not ker.any():
        return 0.0
    pos = np.clip(wa, 0.0, None)
    return float(pos @ o2[:, ker].sum(axis=1))


def _log_ratio_moments(rho, sigma):
    """First and second moments of log(rho) - log(sigma) under rho.

    Returns (D, second_moment) or None when supp(rho) is not contained in
    supp(sigma) within tolerance.
    """
    wa, wb, o2 = _overlap_matrix(as_entries(rho), as_entries(sigma))
    if _support_leak(wa, o2, wb) > SUPPORT_TOL:
        return None
    ia = wa > SUPPORT_TOL
    ib = wb > SUPPORT_TOL
    la = np.log(wa[ia])
    lb = np.log(wb[ib])
    diff = la[:, None] - lb[None, :]
    weights = wa[ia, None] * o2[np.ix_(ia, ib)]
    first = float((weights * diff).sum())
    second = float((weights * diff**2).sum())
    return first, second


def relative_entropy(rho, sigma) -> float:
    """Tr rho (log rho - log sigma), or +inf if the support condition fails."""
    moments = _log_ratio_moments(rho, sigma)
    if moments is None:
        return POS_INF
    return moments[0]


def info_variance(rho, sigma) -> float:
    """Tr rho (log rho - log sigma)^2 - D^2, or +inf on support failure."""
    moments = _log_ratio_moments(rho, sigma)
    if moments is None:
        return POS_INF
    first, second = moments
    return second - first**2


def renyi_divergence(rho, sigma, s: float) -> float:
    """Relative Renyi entropy of order s in [0, 1): psi_s / (s - 1)."""
    if not 0.0 <= s < 1.0:
        raise DomainError(f"Renyi order s={s!r} must lie in [0, 1)")
    val = psi_s(rho, sigma, s)
    if val == NEG_INF:
        return POS_INF
    return val / (s - 1.0)


@dataclass(frozen=True)
class DivergenceReport:
    """Closed-form divergences next to their finite-difference counterparts."""

    D: float
    V: float
    D_sigma_rho: float
    psi_grid: tuple
    resid_d0: float  # |psi'(0) + D(sigma||rho)|
    resid_d1: float  # |psi'(1) - D(rho||sigma)|
    resid_v1: float  # |psi''(1) - V(rho||sigma)|
    min_second_difference: float
    convex_ok: bool

    def __post_init__(self):
        if math.isfinite(self.V) and self.V < -1e-10:
            raise DomainError(f"information variance {self.V!r} < -1e-10")
        if math.isfinite(self.D) and self.D < -1e-10:
            raise DomainError(f"relative entropy {self.D!r} < -1e-10")


def _richardson_d1(f, x: float, h: float) -> float:
    d = lambda hh: (f(x + hh) - f(x - hh)) / (2.0 * hh)
    return (4.0 * d(h / 2.0) - d(h)) / 3.0


def _richardson_d2(f, x: float, h: float) -> float:
    d = lambda hh: (f(x + hh) - 2.0 * f(x) + f(x - hh)) / hh**2
    return (4.0 * d(h / 2.0) - d(h)) / 3.0


def psi_derivative_check(rho, sigma, h: float = 1e-4) -> DivergenceReport:
    """Verify the derivative identities of s -> psi_s against closed forms.

    psi'(0) = -D(sigma||rho), psi'(1) = D(rho||sigma), psi''(1) = V(rho||sigma);
    convexity is checked through second differences on a 21-point grid.
    Both states must be faithful (the stencil leaves [0, 1]).
    """
    if h <= 0:
        raise DomainError("finite-difference step must be positive")
    f = lambda s: psi_s(rho, sigma, s)
    d_rs = relative_entropy(rho, sigma)
    d_sr = relative_entropy(sigma, rho)
    v_rs = info_variance(rho, sigma)
    grid = np.linspace(0.0, 1.0, 21)
    vals = np.array([f(s) for s in grid])
    second_diffs = vals[2:] - 2.0 * vals[1:-1] + vals[:-2]
    min_sd = float(second_diffs.min())
    return DivergenceReport(
        D=d_rs,
        V=v_rs,
        D_sigma_rho=d_sr,
        psi_grid=tuple(zip((float(s) for s in grid), (float(v) for v in vals))),
        resid_d0=abs(_richardson_d1(f, 0.0, h) + d_sr),
        resid_d1=abs(_richardson_d1(f, 1.0, h) - d_rs),
        resid_v1=abs(_richardson_d2(f, 1.0, h) - v_rs),
        min_second_difference=min_sd,
        convex_ok=min_sd >= -1e-8,
    )

"""Relative modular spectrum and the Nussbaum-Szkola spectral measure.

The relative modular operator of a pair (rho, sigma) acts by
A -> rho A sigma^(-1); its spectrum is the set of eigenvalue ratios
lambda/mu, weighted by spectral-projector overlaps.  The induced measure on
x = -log(lambda/mu) with mass mu * Tr(P_lambda(rho) P_mu(sigma)) has cumulant
generating function log E[e^(-sX)] = psi_s, which is the bridge from operator
traces to classical probability used throughout the package.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import AtomExplosion, DomainError, NotNormalized, SingularSigma
from .operators import SUPPORT_TOL, as_entries, clustered_eigh

ATOM_MERGE_TOL = 1e-10
OVERLAP_TOL = 1e-14
ATOM_CAP = 10**7


@dataclass(frozen=True)
class SpectralMeasure:
    """Finite discrete measure on the real line (atoms ascending, +inf last)."""

    xs: np.ndarray
    ps: np.ndarray
    total: float

    @property
    def atoms(self):
        return list(zip(self.xs.tolist(), self.ps.tolist()))

    def __len__(self) -> int:
        return len(self.xs)


def measure_from_atoms(xs, ps, merge_tol: float = ATOM_MERGE_TOL) -> SpectralMeasure:
    """Build a measure from raw atoms, merging positions within merge_tol."""
    xs = np.asarray(xs, dtype=float)
    ps = np.asarray(ps, dtype=float)
    keep = ps > 0.0
    xs, ps = xs[keep], ps[keep]
    finite = np.isfinite(xs)
    inf_mass = float(ps[~finite].sum())
    xs, ps = xs[finite], ps[finite]
    order = np.argsort(xs)
    xs, ps = xs[order], ps[order]
    out_x, out_p = [], []
    i = 0
    while i < len(xs):
        j = i + 1
        while j < len(xs) and xs[j] - xs[j - 1] <= merge_tol:
            j += 1
        mass = ps[i:j].sum()
        out_x.append(float((xs[i:j] * ps[i:j]).sum() / mass))
        out_p.append(float(mass))
        i = j
    if inf_mass > 0.0:
        out_x.append(math.inf)
        out_p.append(inf_mass)
    xa = np.array(out_x)
    pa = np.array(out_p)
    xa.flags.writeable = False
    pa.flags.writeable = False
    return SpectralMeasure(xs=xa, ps=pa, total=float(pa.sum()))


def point_mass(x: float, p: float = 1.0) -> SpectralMeasure:
    return measure_from_atoms([x], [p])


@dataclass(frozen=True)
class RatioEntry:
    lam: float
    mu: float
    overlap: float
    ratio: float


@dataclass(frozen=True)
class ModularRatioTable:
    """Raw (lambda, mu) spectrum pairs with projector overlaps, unmerged."""

    entries: tuple

    def marginal_rho(self) -> float:
        return sum(e.lam * e.overlap for e in self.entries)

    def marginal_sigma(self) -> float:
        return sum(e.mu * e.overlap for e in self.entries)


def _pair_spectrum(rho, sigma):
    """Clustered spectra of both operators plus grouped overlaps."""
    a = as_entries(rho)
    b = as_entries(sigma)
    la, ma, va, ba = clustered_eigh(a)
    lb, mb, vb, bb = clustered_eigh(b)
    c = va.conj().T @ vb
    o2 = c.real**2 + c.imag**2
    ra = np.array([s for s, _ in ba])
    rb = np.array([s for s, _ in bb])
    grouped = np.add.reduceat(np.add.reduceat(o2, ra, axis=0), rb, axis=1)
    return la, lb, grouped


def modular_ratio_table(rho, sigma) -> ModularRatioTable:
    """All eigenvalue-ratio rows with overlap above 1e-14.

    Requires sigma faithful (its clustered eigenvalues strictly positive).
    """
    la, lb, grouped = _pair_spectrum(rho, sigma)
    if lb.min() <= SUPPORT_TOL:
        raise SingularSigma(
            f"sigma has a numerically zero eigenvalue ({lb.min():.3e})"
        )
    entries = []
    for i, lam in enumerate(la):
        for j, mu in enumerate(lb):
            ov = float(grouped[i, j])
            if ov > OVERLAP_TOL:
                entries.append(
                    RatioEntry(
                        lam=float(lam),
                        mu=float(mu),
                        overlap=ov,
                        ratio=float(lam / mu),
                    )
                )
    return ModularRatioTable(entries=tuple(entries))


def ns_spectral_measure(rho, sigma) -> SpectralMeasure:
    """Nussbaum-Szkola measure of -log(modular spectrum) weighted by sigma.

    Atom at x = -log(lambda/mu) with mass mu * Tr(P_lambda(rho) P_mu(sigma)).
    Zero eigenvalues of rho produce an atom at +inf.  Accepts general PSD
    inputs; for states the total mass is 1, in general it is Tr(sigma).
    """
    la, lb, grouped = _pair_spectrum(rho, sigma)
    if lb.min() <= SUPPORT_TOL:
        raise SingularSigma(
            f"sigma has a numerically zero eigenvalue ({lb.min():.3e})"
        )
    la = np.where(np.abs(la) <= SUPPORT_TOL, 0.0, la)
    xs, ps = [], []
    log_mu = np.log(lb)
    for i, lam in enumerate(la):
        x_row = math.inf if lam <= 0.0 else None
        for j in range(len(lb)):
            mass = lb[j] * grouped[i, j]
            if mass <= OVERLAP_TOL:
                continue
            xs.append(x_row if x_row is not None else float(log_mu[j] - math.log(lam)))
            ps.append(float(mass))
    return measure_from_atoms(xs, ps)


def cgf(m: SpectralMeasure, z: complex) -> complex:
    """log integral of e^(-z x) dm(x), principal branch, log-sum-exp guarded."""
    z = complex(z)
    xs, ps = m.xs, m.ps
    finite = np.isfinite(xs)
    if z == 0:
        return complex(math.log(m.total))
    if not finite.all():
        if z.real > 0:
            xs, ps = xs[finite], ps[finite]  # e^(-zx) -> 0 at +inf
        else:
            raise DomainError(
                "measure has mass at +inf; cgf undefined for Re z <= 0"
            )
    if len(xs) == 0:
        return complex(-math.inf)
    w = -z * xs
    shift = float(w.real.max())
    s = complex((ps * np.exp(w - shift)).sum())
    return shift + cmath.log(s)


def measure_cdf(m: SpectralMeasure, x: float) -> float:
    """Right-continuous distribution function: mass of atoms <= x."""
    idx = int(np.searchsorted(m.xs, x, side="right"))
    return float(m.ps[:idx].sum())


def measure_mean(m: SpectralMeasure) -> float:
    return float((m.xs * m.ps).sum() / m.total)


def measure_variance(m: SpectralMeasure) -> float:
    mu = measure_mean(m)
    return float(((m.xs - mu) ** 2 * m.ps).sum() / m.total)


def convolve(m1: SpectralMeasure, m2: SpectralMeasure) -> SpectralMeasure:
    """Distribution of the sum of independent draws; atoms merged at 1e-10."""
    n = len(m1) * len(m2)
    if n > ATOM_CAP:
        raise AtomExplosion(f"convolution would create {n} atoms (cap {ATOM_CAP})")
    xs = np.add.outer(m1.xs, m2.xs).ravel()
    ps = np.multiply.outer(m1.ps, m2.ps).ravel()
    return measure_from_atoms(xs, ps)


def convolve_power(m: SpectralMeasure, n: int) -> SpectralMeasure:
    """n-fold self-convolution by binary exponentiation."""
    if n < 0:
        raise DomainError("convolution power must be nonnegative")
    result = point_mass(0.0, 1.0)
    base = m
    k = n
    while k:
        if k & 1:
            result = convolve(result, base)
        k >>= 1
        if k:
            base = convolve(base, base)
    return result


def sample(m: SpectralMeasure, count: int, seed: int) -> np.ndarray:
    """Inverse-CDF sampling; deterministic under a fixed seed."""
    if abs(m.total - 1.0) > 1e-9:
        raise NotNormalized(f"total mass {m.total!r} is not 1")
    rng = np.random.default_rng(seed)
    cum = np.cumsum(m.ps)
    cum[-1] = m.total  # guard the top edge against rounding
    u = rng.random(count)
    idx = np.searchsorted(cum, u, side="right")
    return m.xs[np.minimum(idx, len(m.xs) - 1)]

"""Entropy-like information metrics on density-operator ensembles.

Everything is reported in nats. The Q2 measure ln(2 / (1 + Tr rho^2)) is
implemented three ways (purity, spectral expansion, contour quadrature);
the purity form is the cheap, stable route and the other two exist as
independent cross-checks of the same quantity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy.stats import unitary_group

from .qhilbert import DensityOperator, Spectrum, purity, spectrum_of

# Eigenvalues below this are dropped before the spectral formulas; they
# contribute exactly nothing to either expansion.
_DROP_TOL = 1e-12

# Gaps smaller than this among O(1) eigenvalues make the float evaluation of
# the spectral formulas lose more than ~1e-10; such inputs take the
# high-precision perturbation path instead.
_CAREFUL_GAP = 1e-6
_CAREFUL_MAGNITUDE = 1e-2
_EXACT_GAP = 1e-12

# Inside the high-precision path, eigenvalues closer than this are treated
# as one degenerate cluster and spread symmetrically before evaluation.
_MERGE_GAP = 1e-9
_SPREAD_EPS = 1e-7
_MP_DPS = 80


@dataclass(frozen=True)
class Ensemble:
    """Weighted collection of density operators on a common space."""

    members: tuple

    def __init__(self, members):
        mem = tuple((float(p), rho) for p, rho in members)
        if not mem:
            raise ValueError("ensemble must be nonempty")
        if any(p < -1e-12 for p, _ in mem):
            raise ValueError("probabilities must be non-negative")
        total = sum(p for p, _ in mem)
        if abs(total - 1.0) > 1e-10:
            raise ValueError(f"probabilities sum to {total}, expected 1")
        dims = {rho.dim for _, rho in mem}
        if len(dims) != 1:
            raise ValueError("all ensemble members must share one dimension")
        object.__setattr__(self, "members", mem)

    @property
    def dim(self) -> int:
        return self.members[0][1].dim

    def average(self) -> DensityOperator:
        avg = sum(p * rho.matrix for p, rho in self.members)
        return DensityOperator(self.dim, avg)


def von_neumann(rho: DensityOperator) -> float:
    """-Tr(rho ln rho) in nats, with the 0 ln 0 := 0 convention."""
    w = np.linalg.eigvalsh(rho.matrix)
    w = np.clip(w, 0.0, None)
    nz = w[w > 0.0]
    return float(-np.sum(nz * np.log(nz)))


def holevo_chi(e: Ensemble) -> float:
    """Entropy of the average state minus the average member entropy."""
    return von_neumann(e.average()) - sum(p * von_neumann(rho) for p, rho in e.members)


# ---------------------------------------------------------------------------
# Spectral formulas with removable singularities.


def _cluster_sorted(vals, gap):
    """Group a descending sequence into clusters of near-equal values."""
    clusters = [[0]]
    for i in range(1, len(vals)):
        if vals[i - 1] - vals[i] < gap:
            clusters[-1].append(i)
        else:
            clusters.append([i])
    return clusters


def _needs_high_precision(vals: np.ndarray) -> bool:
    for a, b in zip(vals, vals[1:]):
        gap = a - b
        if gap < _EXACT_GAP:
            return True
        if gap < _CAREFUL_GAP and a > _CAREFUL_MAGNITUDE:
            return True
    return False


def _prepare(spec: Spectrum) -> np.ndarray:
    vals = np.clip(np.sort(np.asarray(spec.values, dtype=float))[::-1], 0.0, None)
    return vals[vals > _DROP_TOL]


def _subentropy_float(vals: np.ndarray) -> float:
    n = len(vals)
    if n == 1:
        return 0.0
    diff = vals[:, None] - vals[None, :]
    np.fill_diagonal(diff, 1.0)
    ratio = vals[:, None] / diff
    np.fill_diagonal(ratio, 1.0)
    prods = np.prod(ratio, axis=1)
    return float(-np.sum(vals * np.log(vals) * prods))


def _q2_sum_float(vals: np.ndarray) -> float:
    n = len(vals)
    if n == 1:
        return float(vals[0] ** 2)
    diff = vals[:, None] - vals[None, :]
    np.fill_diagonal(diff, 1.0)
    denom = np.prod(diff, axis=1)
    return float(np.sum(vals ** (n + 1) / denom))


def _subentropy_mp(vals) -> mpmath.mpf:
    n = len(vals)
    if n == 1:
        return mpmath.mpf(0)
    total = mpmath.mpf(0)
    for k in range(n):
        prod = mpmath.mpf(1)
        for l in range(n):
            if l != k:
                prod *= vals[k] / (vals[k] - vals[l])
        total -= vals[k] * mpmath.log(vals[k]) * prod
    return total


def _q2_sum_mp(vals) -> mpmath.mpf:
    n = len(vals)
    if n == 1:
        return vals[0] ** 2
    total = mpmath.mpf(0)
    for i in range(n):
        denom = mpmath.mpf(1)
        for j in range(n):
            if j != i:
                denom *= vals[i] - vals[j]
        total += vals[i] ** (n + 1) / denom
    return total


def _spread_clusters_mp(vals, eps):
    """Replace degenerate clusters by symmetric, sum-preserving spreads."""
    out = list(vals)
    for cluster in _cluster_sorted(vals, _MERGE_GAP):
        m = len(cluster)
        if m == 1:
            continue
        center = sum(vals[i] for i in cluster) / m
        for j, i in enumerate(cluster):
            out[i] = center + eps * (m - 1 - 2 * j)
    return out


def _eval_spectral(spec: Spectrum, float_core, mp_core) -> float:
    vals = _prepare(spec)
    if len(vals) == 0:
        return 0.0
    if not _needs_high_precision(vals):
        return float_core(vals)
    with mpmath.workdps(_MP_DPS):
        mp_vals = [mpmath.mpf(float(v)) for v in vals]
        eps = mpmath.mpf(_SPREAD_EPS)
        f1 = mp_core(_spread_clusters_mp(mp_vals, eps))
        f2 = mp_core(_spread_clusters_mp(mp_vals, eps / 2))
        # Richardson extrapolation of the O(eps^2) spreading error.
        return float((4 * f2 - f1) / 3)


def subentropy(spec: Spectrum) -> float:
    """Spectral lower bound on accessible information, in nats."""
    return _eval_spectral(spec, _subentropy_float, _subentropy_mp)


def chi_q(e: Ensemble) -> float:
    """Subentropy of the average state minus the average member subentropy."""
    return subentropy(spectrum_of(e.average())) - sum(
        p * subentropy(spectrum_of(rho)) for p, rho in e.members
    )


def q2_from_purity_value(p: float) -> float:
    return math.log(2.0 / (1.0 + p))


def q2_purity(rho: DensityOperator) -> float:
    """Randomized-basis information measure ln(2 / (1 + Tr rho^2))."""
    return q2_from_purity_value(purity(rho))


def q2_spectral(spec: Spectrum) -> float:
    """Same measure via the eigenvalue expansion sum_i l_i^{n+1} / prod gaps."""
    vals = _prepare(spec)
    if len(vals) == 0:
        raise ValueError("spectrum has no weight")
    arg = _eval_spectral(spec, _q2_sum_float, _q2_sum_mp)
    return -math.log(arg)


def q2_contour(spec: Spectrum, radius: float = 2.0, n_nodes: int = 256) -> float:
    """Same measure via trapezoid quadrature of the contour representation."""
    if n_nodes < 64:
        raise ValueError("need at least 64 quadrature nodes")
    vals = np.asarray(spec.values, dtype=float)
    if radius <= np.max(vals):
        raise ValueError(
            f"contour radius {radius} must exceed the largest eigenvalue {np.max(vals)}"
        )
    theta = 2.0 * np.pi * np.arange(n_nodes) / n_nodes
    z = radius * np.exp(1j * theta)
    integrand = z ** 2 / np.prod(1.0 - vals[:, None] / z[None, :], axis=0)
    val = float(np.mean(integrand).real)
    return -math.log(val)


def chi2(e: Ensemble) -> float:
    """Gain of the Q2 measure from mixing the ensemble (always >= 0)."""
    return q2_purity(e.average()) - sum(p * q2_purity(rho) for p, rho in e.members)


def random_density(d: int, rng: np.random.Generator, rank: int | None = None) -> DensityOperator:
    """Random mixed state from a normalized Ginibre matrix G G^dag."""
    if rank is None:
        rank = d
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    m = g @ g.conj().T
    m /= np.trace(m).real
    m = 0.5 * (m + m.conj().T)
    return DensityOperator(d, m)


def random_spectrum(n: int, rng: np.random.Generator) -> Spectrum:
    """Random point on the probability simplex, sorted descending."""
    v = rng.dirichlet(np.ones(n))
    return Spectrum(np.sort(v)[::-1])


# ---------------------------------------------------------------------------
# Monte-Carlo check of the Haar moment formulas behind Q2.


@dataclass(frozen=True)
class HaarMoments:
    """Monte-Carlo estimates of the two Haar basis moments, with errors."""

    marginal: float
    marginal_se: float
    pure: float
    pure_se: float


def haar_moment_mc(
    rho: DensityOperator,
    n_samples: int,
    rng: np.random.Generator,
    chunk: int = 4096,
) -> HaarMoments:
    """Sample Haar-random orthonormal bases and estimate both probability moments.

    Bases come from QR-orthonormalized complex Gaussian matrices. The
    "marginal" moment is sum_j <a_j|rho|a_j>^2, whose Haar mean is
    (Tr rho^2 + 1)/(d + 1); the "pure" moment is sum_j |<a_j|psi>|^4 for a
    fixed pure reference state, whose Haar mean is 2/(d + 1).
    """
    if n_samples < 1000:
        raise ValueError("need at least 1000 samples for a stable estimate")
    d = rho.dim
    w, v = np.linalg.eigh(rho.matrix)
    psi = v[:, -1]  # any fixed pure state works; Haar averaging erases the choice
    marg = np.empty(n_samples)
    pure = np.empty(n_samples)
    done = 0
    while done < n_samples:
        m = min(chunk, n_samples - done)
        u = unitary_group.rvs(d, size=m, random_state=rng)
        if m == 1:
            u = u[None, :, :]
        # basis vectors are the rows of each sampled unitary
        probs = np.einsum("nja,ab,njb->nj", u, rho.matrix, u.conj(), optimize=True).real
        marg[done : done + m] = np.sum(probs ** 2, axis=1)
        amp = u @ psi
        pure[done : done + m] = np.sum(np.abs(amp) ** 4, axis=1)
        done += m
    return HaarMoments(
        marginal=float(np.mean(marg)),
        marginal_se=float(np.std(marg, ddof=1) / np.sqrt(n_samples)),
        pure=float(np.mean(pure)),
        pure_se=float(np.std(pure, ddof=1) / np.sqrt(n_samples)),
    )

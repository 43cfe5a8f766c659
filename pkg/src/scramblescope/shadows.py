"""Simulated classical-shadow pipeline with single-qubit Pauli measurements.

A snapshot stores, per site, which Pauli basis was measured (X/Y/Z) and the
outcome bit. Subsystem purities and cross-state overlaps are estimated from
the three-valued lookup kernel {5, -4, 1/2} between snapshot pairs, robustly
aggregated by median-of-means.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .qhilbert import (
    HADAMARD,
    PAULI_I,
    PHASE_S,
    SiteSubset,
    StateVector,
    _apply_local_unitary_raw,
    _born_sample_raw,
)

BASIS_X, BASIS_Y, BASIS_Z = 0, 1, 2
BASIS_CHARS = "XYZ"

# Rotation applied before a computational-basis measurement so that the
# outcome projects onto the chosen Pauli eigenbasis.
_BASIS_ROTATIONS = (
    HADAMARD,                       # X
    HADAMARD @ PHASE_S.conj().T,    # Y
    PAULI_I,                        # Z
)

# Single-site snapshot factor 3 U^dag |b><b| U - I for each (basis, bit).
def _snapshot_factor(basis: int, bit: int) -> np.ndarray:
    u = _BASIS_ROTATIONS[basis]
    ket = np.zeros(2, dtype=complex)
    ket[bit] = 1.0
    eig = u.conj().T @ ket
    return 3.0 * np.outer(eig, eig.conj()) - PAULI_I


def kernel_value(basis1: int, bit1: int, basis2: int, bit2: int) -> float:
    """Trace inner product of two single-site snapshot factors."""
    for b in (basis1, basis2):
        if b not in (BASIS_X, BASIS_Y, BASIS_Z):
            raise ValueError(f"invalid basis code {b}")
    for o in (bit1, bit2):
        if o not in (0, 1):
            raise ValueError(f"invalid outcome bit {o}")
    if basis1 != basis2:
        return 0.5
    return 5.0 if bit1 == bit2 else -4.0


# 6x6 table indexed by the packed code basis*2 + bit.
_KERNEL_TABLE = np.array(
    [
        [kernel_value(c1 // 2, c1 % 2, c2 // 2, c2 % 2) for c2 in range(6)]
        for c1 in range(6)
    ]
)


@dataclass(frozen=True)
class Snapshot:
    """One classical-shadow record: per-site basis codes and outcome bits."""

    bases: np.ndarray
    outcomes: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.bases, dtype=np.uint8)
        o = np.asarray(self.outcomes, dtype=np.uint8)
        object.__setattr__(self, "bases", b)
        object.__setattr__(self, "outcomes", o)
        if b.shape != o.shape or b.ndim != 1:
            raise ValueError("bases and outcomes must be 1-D arrays of equal length")
        if np.any(b > 2) or np.any(o > 1):
            raise ValueError("basis codes must be in {0,1,2}, outcomes in {0,1}")

    @property
    def n_sites(self) -> int:
        return len(self.bases)

    def dense_matrix(self) -> np.ndarray:
        """Full tensor-product snapshot matrix (test oracle; exponential size)."""
        m = np.ones((1, 1), dtype=complex)
        for basis, bit in zip(self.bases, self.outcomes):
            m = np.kron(m, _snapshot_factor(int(basis), int(bit)))
        return m


@dataclass(frozen=True)
class ShadowSet:
    """Ordered collection of snapshots from one source state."""

    bases: np.ndarray
    outcomes: np.ndarray
    n_sites: int
    source_label: str = ""
    seed: int | None = None

    def __post_init__(self):
        b = np.asarray(self.bases, dtype=np.uint8)
        o = np.asarray(self.outcomes, dtype=np.uint8)
        object.__setattr__(self, "bases", b)
        object.__setattr__(self, "outcomes", o)
        if b.ndim != 2 or b.shape != o.shape or b.shape[1] != self.n_sites:
            raise ValueError("snapshot arrays must be (M, n_sites) and congruent")

    def __len__(self) -> int:
        return self.bases.shape[0]

    def __getitem__(self, i: int) -> Snapshot:
        return Snapshot(self.bases[i], self.outcomes[i])

    def codes(self) -> np.ndarray:
        """Packed per-site records basis*2 + bit, shape (M, n_sites)."""
        return (self.bases.astype(np.int64) * 2 + self.outcomes).astype(np.int64)

    @classmethod
    def from_snapshots(
        cls, snapshots: Sequence[Snapshot], source_label: str = "", seed=None
    ) -> "ShadowSet":
        if not snapshots:
            raise ValueError("need at least one snapshot")
        n = snapshots[0].n_sites
        if any(s.n_sites != n for s in snapshots):
            raise ValueError("snapshots must share one chain length")
        return cls(
            bases=np.stack([s.bases for s in snapshots]),
            outcomes=np.stack([s.outcomes for s in snapshots]),
            n_sites=n,
            source_label=source_label,
            seed=seed,
        )


@dataclass(frozen=True)
class MoMConfig:
    """Median-of-means batching: n_batches batches of batch_size snapshots."""

    n_batches: int
    batch_size: int

    def __post_init__(self):
        if self.n_batches < 1 or self.batch_size < 1:
            raise ValueError("batch count and size must be positive")

    def validate_available(self, n_available: int, min_batch: int = 1) -> None:
        if self.n_batches * self.batch_size > n_available:
            raise ValueError(
                f"{self.n_batches} batches of {self.batch_size} exceed "
                f"{n_available} available snapshots"
            )
        if self.batch_size < min_batch:
            raise ValueError(f"batches of {self.batch_size} are too small")


def sample_snapshot(
    state: StateVector,
    rng: np.random.Generator,
    bases: np.ndarray | None = None,
) -> Snapshot:
    """Measure every site in a random (or forced, for tests) Pauli basis."""
    n = state.n_sites
    if bases is None:
        bases = rng.integers(0, 3, size=n)
    bases = np.asarray(bases, dtype=np.uint8)
    amps = state.amplitudes
    for site in range(n):
        b = int(bases[site])
        if b != BASIS_Z:
            amps = _apply_local_unitary_raw(amps, n, site, _BASIS_ROTATIONS[b])
    outcomes = _born_sample_raw(amps, n, rng)
    return Snapshot(bases, outcomes)


def sample_shadow_set(
    state: StateVector,
    n_snapshots: int,
    rng: np.random.Generator,
    source_label: str = "",
    seed: int | None = None,
) -> ShadowSet:
    bases = rng.integers(0, 3, size=(n_snapshots, state.n_sites)).astype(np.uint8)
    outcomes = np.empty((n_snapshots, state.n_sites), dtype=np.uint8)
    n = state.n_sites
    for i in range(n_snapshots):
        amps = state.amplitudes
        for site in range(n):
            b = int(bases[i, site])
            if b != BASIS_Z:
                amps = _apply_local_unitary_raw(amps, n, site, _BASIS_ROTATIONS[b])
        outcomes[i] = _born_sample_raw(amps, n, rng)
    return ShadowSet(bases, outcomes, n, source_label=source_label, seed=seed)


def pair_kernel(s1: Snapshot, s2: Snapshot, subset: SiteSubset) -> float:
    """Product of single-site kernel values over the subset sites."""
    if s1.n_sites != s2.n_sites:
        raise ValueError("snapshots come from different chain lengths")
    subset.validate_for(s1.n_sites)
    value = 1.0
    for site in subset:
        value *= kernel_value(
            int(s1.bases[site]), int(s1.outcomes[site]),
            int(s2.bases[site]), int(s2.outcomes[site]),
        )
    return value


def median_of_means(samples, K: int) -> float:
    """Median of K in-order batch means; K=1 reduces to the plain mean."""
    samples = np.asarray(samples, dtype=float)
    if K < 1:
        raise ValueError("K must be at least 1")
    if K > len(samples):
        raise ValueError(f"K={K} exceeds {len(samples)} samples")
    usable = (len(samples) // K) * K
    means = samples[:usable].reshape(K, -1).mean(axis=1)
    return float(np.median(means))


def _subset_kernel_matrix(
    codes_a: np.ndarray, codes_b: np.ndarray, sites: Iterable[int]
) -> np.ndarray:
    g = None
    for site in sites:
        k = _KERNEL_TABLE[codes_a[:, site][:, None], codes_b[:, site][None, :]]
        g = k if g is None else g * k
    return g


def _batch_slices(mom: MoMConfig):
    return [
        slice(k * mom.batch_size, (k + 1) * mom.batch_size)
        for k in range(mom.n_batches)
    ]


def purity_estimate(shadows: ShadowSet, subset: SiteSubset, mom: MoMConfig) -> float:
    """Median-of-means U-statistic estimate of Tr(rho_A^2)."""
    subset.validate_for(shadows.n_sites)
    mom.validate_available(len(shadows), min_batch=2)
    codes = shadows.codes()
    means = []
    for sl in _batch_slices(mom):
        c = codes[sl]
        g = _subset_kernel_matrix(c, c, subset)
        b = c.shape[0]
        means.append((g.sum() - np.trace(g)) / (b * (b - 1)))
    return float(np.median(means))


def overlap_estimate(
    shadows1: ShadowSet, shadows2: ShadowSet, subset: SiteSubset, mom: MoMConfig
) -> float:
    """Median-of-means estimate of the cross overlap Tr(rho1_A rho2_A)."""
    if shadows1.n_sites != shadows2.n_sites:
        raise ValueError("shadow sets come from different chain lengths")
    subset.validate_for(shadows1.n_sites)
    mom.validate_available(min(len(shadows1), len(shadows2)))
    c1, c2 = shadows1.codes(), shadows2.codes()
    means = []
    for sl in _batch_slices(mom):
        g = _subset_kernel_matrix(c1[sl], c2[sl], subset)
        means.append(g.mean())
    return float(np.median(means))


@dataclass(frozen=True)
class Chi2Estimate:
    """Plug-in chi2 estimate plus its three raw (unclamped) purity components."""

    value: float
    purity1: float
    purity2: float
    overlap: float


def _clamped_q2(p: float, n_subset: int) -> float:
    lo = 2.0 ** (-n_subset)
    return math.log(2.0 / (1.0 + min(max(p, lo), 1.0)))


def _chi2_from_components(p1: float, p2: float, ov: float, n_subset: int) -> Chi2Estimate:
    p_mix = (p1 + p2 + 2.0 * ov) / 4.0
    value = _clamped_q2(p_mix, n_subset) - 0.5 * (
        _clamped_q2(p1, n_subset) + _clamped_q2(p2, n_subset)
    )
    return Chi2Estimate(value=value, purity1=p1, purity2=p2, overlap=ov)


def chi2_estimate(
    shadows1: ShadowSet,
    shadows2: ShadowSet,
    subset: SiteSubset,
    mom: MoMConfig,
) -> Chi2Estimate:
    """Estimate chi2 on a subset from the two purities and the cross overlap.

    Purities are clamped to [2^-|A|, 1] before the logarithm, so the plug-in
    value can carry a small bias; the raw components are reported alongside.
    """
    p1 = purity_estimate(shadows1, subset, mom)
    p2 = purity_estimate(shadows2, subset, mom)
    ov = overlap_estimate(shadows1, shadows2, subset, mom)
    return _chi2_from_components(p1, p2, ov, len(subset))


def chi2_estimate_many(
    shadows1: ShadowSet,
    shadows2: ShadowSet,
    subsets: Sequence[SiteSubset],
    mom: MoMConfig,
) -> list[Chi2Estimate]:
    """chi2_estimate for many subsets, sharing per-site kernel matrices.

    Equivalent to calling chi2_estimate per subset but computes each batch's
    single-site kernel matrices once and reuses them across subsets.
    """
    if shadows1.n_sites != shadows2.n_sites:
        raise ValueError("shadow sets come from different chain lengths")
    for s in subsets:
        s.validate_for(shadows1.n_sites)
    mom.validate_available(min(len(shadows1), len(shadows2)), min_batch=2)
    c1, c2 = shadows1.codes(), shadows2.codes()
    sites = sorted({site for s in subsets for site in s})
    n_sub = len(subsets)
    means11 = np.empty((n_sub, mom.n_batches))
    means22 = np.empty((n_sub, mom.n_batches))
    means12 = np.empty((n_sub, mom.n_batches))
    for k, sl in enumerate(_batch_slices(mom)):
        a, b = c1[sl], c2[sl]
        k11 = {s: _KERNEL_TABLE[a[:, s][:, None], a[:, s][None, :]] for s in sites}
        k22 = {s: _KERNEL_TABLE[b[:, s][:, None], b[:, s][None, :]] for s in sites}
        k12 = {s: _KERNEL_TABLE[a[:, s][:, None], b[:, s][None, :]] for s in sites}
        nb = a.shape[0]
        for j, subset in enumerate(subsets):
            g11 = g22 = g12 = None
            for site in subset:
                g11 = k11[site] if g11 is None else g11 * k11[site]
                g22 = k22[site] if g22 is None else g22 * k22[site]
                g12 = k12[site] if g12 is None else g12 * k12[site]
            means11[j, k] = (g11.sum() - np.trace(g11)) / (nb * (nb - 1))
            means22[j, k] = (g22.sum() - np.trace(g22)) / (nb * (nb - 1))
            means12[j, k] = g12.mean()
    out = []
    for j, subset in enumerate(subsets):
        out.append(
            _chi2_from_components(
                float(np.median(means11[j])),
                float(np.median(means22[j])),
                float(np.median(means12[j])),
                len(subset),
            )
        )
    return out


# ---------------------------------------------------------------------------
# JSONL exchange format: one header line, then one line per snapshot.


def write_jsonl(shadows: ShadowSet, path) -> None:
    with open(path, "w") as fh:
        header = {
            "n_sites": shadows.n_sites,
            "seed": shadows.seed,
            "source_label": shadows.source_label,
        }
        fh.write(json.dumps(header) + "\n")
        for i in range(len(shadows)):
            rec = {
                "b": "".join(BASIS_CHARS[c] for c in shadows.bases[i]),
                "o": "".join(str(int(c)) for c in shadows.outcomes[i]),
            }
            fh.write(json.dumps(rec) + "\n")


def read_jsonl(path) -> ShadowSet:
    with open(path) as fh:
        header = json.loads(fh.readline())
        n = int(header["n_sites"])
        bases, outcomes = [], []
        for line in fh:
            rec = json.loads(line)
            if len(rec["b"]) != n or len(rec["o"]) != n:
                raise ValueError("snapshot line length does not match header")
            bases.append([BASIS_CHARS.index(ch) for ch in rec["b"]])
            outcomes.append([int(ch) for ch in rec["o"]])
    return ShadowSet(
        bases=np.asarray(bases, dtype=np.uint8),
        outcomes=np.asarray(outcomes, dtype=np.uint8),
        n_sites=n,
        source_label=header.get("source_label", ""),
        seed=header.get("seed"),
    )

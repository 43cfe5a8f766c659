"""Experiment orchestration: two-member ensembles swept over time and space.

A scenario fixes a model, an initial product state, a single-site flip
perturbation, a subsystem size, and a time grid. The exact grids and the
shadow-estimated curves below are the data behind the package's heatmap and
tracking experiments.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import __version__ as _version
from .evolve import Propagator, evolve, make_propagator
from .infotheory import Ensemble, chi_q, holevo_chi, q2_from_purity_value
from .models import ModelSpec, build_hamiltonian
from .qhilbert import (
    DensityOperator,
    PAULI_X,
    SiteSubset,
    StateVector,
    apply_local_unitary,
    basis_state,
    partial_trace,
    purity,
)
from .seeding import substream_rng
from .shadows import MoMConfig, chi2_estimate_many, sample_shadow_set

METRIC_NAMES = ("chi2", "holevo", "chi_q")
POLICIES = ("windows_containing_x", "all_subsets")
LN_4_3 = math.log(4.0 / 3.0)


def default_time_grid(t_max: float = 30.0, n_points: int = 301) -> np.ndarray:
    return np.linspace(0.0, t_max, n_points)


def default_perturbation_site(kind: str, n_sites: int) -> int:
    """Center site, stepped down to the nearest active site for PXP."""
    site = n_sites // 2
    if kind == "PXP" and site % 2 == 1:
        site -= 1
    return site


@dataclass(frozen=True)
class ScrambleScenario:
    """Full description of one scrambling experiment."""

    model: ModelSpec
    initial_kind: str
    perturbation_site: int
    subsystem_size: int
    time_grid: np.ndarray
    subset_policy: str = "windows_containing_x"
    metrics: tuple = ("chi2",)
    shots: int | None = None
    master_seed: int = 0
    n_batches: int = 10
    subset_cap: int = 20000

    def __post_init__(self):
        object.__setattr__(self, "metrics", tuple(self.metrics))
        grid = np.asarray(self.time_grid, dtype=float)
        object.__setattr__(self, "time_grid", grid)
        L = self.model.n_sites
        if self.initial_kind not in ("polarized", "neel"):
            raise ValueError(f"unknown initial state kind {self.initial_kind!r}")
        if not 0 <= self.perturbation_site < L:
            raise ValueError(f"perturbation site {self.perturbation_site} out of range")
        if not 1 <= self.subsystem_size <= L:
            raise ValueError(f"subsystem size {self.subsystem_size} out of range")
        if self.subset_policy not in POLICIES:
            raise ValueError(f"unknown subset policy {self.subset_policy!r}")
        if any(m not in METRIC_NAMES for m in self.metrics):
            raise ValueError(f"unknown metric in {self.metrics}")
        if grid.ndim != 1 or grid.size == 0 or grid[0] < 0:
            raise ValueError("time grid must be 1-D and start at t >= 0")
        if grid.size > 1 and np.any(np.diff(grid) <= 0):
            raise ValueError("time grid must be strictly increasing")

    def scenario_echo(self) -> dict:
        """Plain-JSON description for result manifests."""
        d = {
            "model": self.model.kind,
            "n_sites": self.model.n_sites,
            "couplings": dict(self.model.couplings),
            "initial_kind": self.initial_kind,
            "perturbation_site": self.perturbation_site,
            "subsystem_size": self.subsystem_size,
            "subset_policy": self.subset_policy,
            "metrics": list(self.metrics),
            "time_grid": [float(t) for t in self.time_grid],
            "shots": self.shots,
            "master_seed": self.master_seed,
            "n_batches": self.n_batches,
            "units": "nats",
            "version": _version,
        }
        if self.model.disorder is not None:
            dis = self.model.disorder
            d["disorder"] = {
                "fields": [float(x) for x in dis.fields],
                "seed": dis.seed,
                "generator_id": dis.generator_id,
                "W": dis.width,
            }
        return d


@dataclass(frozen=True)
class GridResult:
    """Metric values on the (metric, time, site) grid plus provenance."""

    values: np.ndarray
    metrics: tuple
    time_grid: np.ndarray
    sites: tuple
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", v)
        expected = (len(self.metrics), len(self.time_grid), len(self.sites))
        if v.shape != expected:
            raise ValueError(f"values shape {v.shape}, expected {expected}")
        if np.min(v) < -1e-9:
            raise ValueError(f"metric value below -1e-9: {np.min(v)}")


def _initial_bits(kind: str, n_sites: int) -> list[int]:
    if kind == "polarized":
        return [0] * n_sites
    return [i % 2 for i in range(n_sites)]


def prepare_ensemble(s: ScrambleScenario) -> tuple[StateVector, StateVector]:
    """Unperturbed product state and its single-site flip."""
    bits = _initial_bits(s.initial_kind, s.model.n_sites)
    if s.model.kind == "PXP":
        if s.initial_kind != "neel":
            raise ValueError("PXP scenarios must start from the Neel state")
        if bits[s.perturbation_site] != 0:
            raise ValueError(
                "PXP perturbation must de-excite an active (spin-up) site; "
                f"site {s.perturbation_site} is inactive and the flip would "
                "exit the blockade-respecting subspace"
            )
    psi1 = basis_state(s.model.n_sites, bits)
    psi2 = apply_local_unitary(psi1, s.perturbation_site, PAULI_X)
    return psi1, psi2


def qualifying_subsets(s: ScrambleScenario) -> list[SiteSubset]:
    """Distinct subsets the scenario's policy sweeps over."""
    L, k = s.model.n_sites, s.subsystem_size
    if s.subset_policy == "windows_containing_x":
        subsets = [SiteSubset(range(x0, x0 + k)) for x0 in range(L - k + 1)]
    else:
        count = math.comb(L, k)
        if count > s.subset_cap:
            raise RuntimeError(
                f"{count} subsets of size {k} exceed the configured cap "
                f"{s.subset_cap}"
            )
        subsets = [SiteSubset(c) for c in itertools.combinations(range(L), k)]
    return subsets


def _mixed_density(rho1: DensityOperator, rho2: DensityOperator) -> DensityOperator:
    return DensityOperator(rho1.dim, (rho1.matrix + rho2.matrix) / 2.0)


def exact_chi2_pair(rho1: DensityOperator, rho2: DensityOperator) -> float:
    mix = _mixed_density(rho1, rho2)
    return q2_from_purity_value(purity(mix)) - 0.5 * (
        q2_from_purity_value(purity(rho1)) + q2_from_purity_value(purity(rho2))
    )


def _subset_metrics(
    psi1: StateVector, psi2: StateVector, subset: SiteSubset, metrics
) -> dict:
    rho1 = partial_trace(psi1, subset)
    rho2 = partial_trace(psi2, subset)
    out = {}
    if "chi2" in metrics:
        out["chi2"] = exact_chi2_pair(rho1, rho2)
    if "holevo" in metrics or "chi_q" in metrics:
        ens = Ensemble([(0.5, rho1), (0.5, rho2)])
        if "holevo" in metrics:
            out["holevo"] = holevo_chi(ens)
        if "chi_q" in metrics:
            out["chi_q"] = chi_q(ens)
    return out


def exact_metric_grid(s: ScrambleScenario) -> GridResult:
    """Evaluate the requested metrics on the full (time x site) grid.

    With the windows policy, the value at site x is the maximum over all
    contiguous subsystem windows containing x; with all_subsets, a single
    column holds the global maximum over every size-L_A subset.
    """
    if not s.metrics:
        raise ValueError("scenario requests no metrics")
    h = build_hamiltonian(s.model)
    prop = make_propagator(h)
    psi1_0, psi2_0 = prepare_ensemble(s)
    subsets = qualifying_subsets(s)
    L = s.model.n_sites
    if s.subset_policy == "windows_containing_x":
        sites = tuple(range(L))
        owners = [
            [j for j, sub in enumerate(subsets) if x in sub.indices] for x in range(L)
        ]
    else:
        sites = (0,)
        owners = [list(range(len(subsets)))]
    values = np.zeros((len(s.metrics), len(s.time_grid), len(sites)))
    for ti, t in enumerate(s.time_grid):
        psi1 = evolve(prop, psi1_0, t)
        psi2 = evolve(prop, psi2_0, t)
        per_subset = [_subset_metrics(psi1, psi2, sub, s.metrics) for sub in subsets]
        for mi, metric in enumerate(s.metrics):
            vals = np.array([pm[metric] for pm in per_subset])
            for ci, owner in enumerate(owners):
                values[mi, ti, ci] = np.max(vals[owner])
    values = np.maximum(values, 0.0)
    return GridResult(
        values=values,
        metrics=s.metrics,
        time_grid=s.time_grid,
        sites=sites,
        metadata=s.scenario_echo(),
    )


def shadow_metric_curve(s: ScrambleScenario, subsystem_sizes=None) -> list[dict]:
    """Shadow-estimated and exact maximal chi2 along the time grid.

    At each time a fresh pair of shadow sets is generated; each requested
    subsystem size reuses the same sets, as the protocol allows. Rows carry
    (t, L_A, chi2_shadow, chi2_exact).
    """
    if s.shots is None:
        raise ValueError("scenario has no shot budget")
    if set(s.metrics) != {"chi2"}:
        raise ValueError("shadow curves support the chi2 metric only")
    if s.shots < 2 * s.n_batches:
        raise ValueError(
            f"{s.shots} shots cannot fill {s.n_batches} batches of >= 2 snapshots"
        )
    if subsystem_sizes is None:
        subsystem_sizes = (s.subsystem_size,)
    mom = MoMConfig(n_batches=s.n_batches, batch_size=s.shots // s.n_batches)
    h = build_hamiltonian(s.model)
    prop = make_propagator(h)
    psi1_0, psi2_0 = prepare_ensemble(s)
    L = s.model.n_sites
    subsets_by_size = {}
    for k in subsystem_sizes:
        count = math.comb(L, k)
        if count > s.subset_cap:
            raise RuntimeError(f"{count} subsets exceed cap {s.subset_cap}")
        subsets_by_size[k] = [
            SiteSubset(c) for c in itertools.combinations(range(L), k)
        ]
    rows = []
    for ti, t in enumerate(s.time_grid):
        psi1 = evolve(prop, psi1_0, t)
        psi2 = evolve(prop, psi2_0, t)
        set1 = sample_shadow_set(
            psi1, s.shots, substream_rng(s.master_seed, "shadow:state1", ti),
            source_label="state1", seed=s.master_seed,
        )
        set2 = sample_shadow_set(
            psi2, s.shots, substream_rng(s.master_seed, "shadow:state2", ti),
            source_label="state2", seed=s.master_seed,
        )
        for k in subsystem_sizes:
            subsets = subsets_by_size[k]
            ests = chi2_estimate_many(set1, set2, subsets, mom)
            exact = max(
                exact_chi2_pair(partial_trace(psi1, sub), partial_trace(psi2, sub))
                for sub in subsets
            )
            rows.append(
                {
                    "t": float(t),
                    "L_A": int(k),
                    "chi2_shadow": max(e.value for e in ests),
                    "chi2_exact": max(exact, 0.0),
                }
            )
    return rows


def _cage_window(cage: SiteSubset, site: int, size: int) -> SiteSubset:
    """Contiguous window of the given size inside the cage containing site."""
    lo, hi = cage.indices[0], cage.indices[-1]
    if size > len(cage):
        raise ValueError("subsystem larger than the cage")
    start = min(max(site - size // 2, lo), hi - size + 1)
    if not start <= site <= start + size - 1:
        raise ValueError("window does not contain the perturbation site")
    return SiteSubset(range(start, start + size))


def mbl_cage_compare(
    L_full: int,
    cage_sites: SiteSubset,
    s: ScrambleScenario,
    boundary_coupling_scale: float = 1.0,
) -> list[dict]:
    """chi2 on a cage-interior subsystem: full chain vs. isolated cage.

    The isolated cage reuses the full chain's disorder fields restricted to
    the cage sites. boundary_coupling_scale rescales both exchange couplings
    on the bonds crossing the cage boundary of the full chain; 0 severs them
    (exact decoupling control).
    """
    from .models import build_mbl  # local import to keep module deps one-way

    if s.model.kind != "MBL":
        raise ValueError("cage comparison is defined for the MBL model")
    if s.model.n_sites != L_full:
        raise ValueError("scenario length does not match L_full")
    cage_sites.validate_for(L_full)
    idx = cage_sites.indices
    if any(b - a != 1 for a, b in zip(idx, idx[1:])):
        raise ValueError("cage must be contiguous")
    if s.perturbation_site not in idx:
        raise ValueError("cage must contain the perturbation site")
    c = s.model.couplings
    disorder = s.model.disorder
    bond_scale = np.ones(L_full - 1)
    if idx[0] > 0:
        bond_scale[idx[0] - 1] = boundary_coupling_scale
    if idx[-1] < L_full - 1:
        bond_scale[idx[-1]] = boundary_coupling_scale
    h_full = build_mbl(
        L_full,
        J_perp=c.get("J_perp", 1.0),
        J_z=c.get("J_z", 1.0),
        disorder=disorder,
        bond_scale=bond_scale,
    )
    from .models import DisorderRealization

    cage_disorder = DisorderRealization(
        fields=disorder.fields[list(idx)],
        seed=disorder.seed,
        generator_id=disorder.generator_id,
        width=disorder.width,
    )
    h_cage = build_mbl(
        len(idx),
        J_perp=c.get("J_perp", 1.0),
        J_z=c.get("J_z", 1.0),
        disorder=cage_disorder,
    )
    bits = _initial_bits(s.initial_kind, L_full)
    psi1_full = basis_state(L_full, bits)
    psi2_full = apply_local_unitary(psi1_full, s.perturbation_site, PAULI_X)
    cage_bits = [bits[i] for i in idx]
    rel_site = idx.index(s.perturbation_site)
    psi1_cage = basis_state(len(idx), cage_bits)
    psi2_cage = apply_local_unitary(psi1_cage, rel_site, PAULI_X)
    window = _cage_window(cage_sites, s.perturbation_site, s.subsystem_size)
    window_rel = SiteSubset(idx.index(x) for x in window)
    prop_full = make_propagator(h_full)
    prop_cage = make_propagator(h_cage)
    rows = []
    for t in s.time_grid:
        f1, f2 = evolve(prop_full, psi1_full, t), evolve(prop_full, psi2_full, t)
        c1, c2 = evolve(prop_cage, psi1_cage, t), evolve(prop_cage, psi2_cage, t)
        rows.append(
            {
                "t": float(t),
                "chi2_full": exact_chi2_pair(
                    partial_trace(f1, window), partial_trace(f2, window)
                ),
                "chi2_cage": exact_chi2_pair(
                    partial_trace(c1, window_rel), partial_trace(c2, window_rel)
                ),
            }
        )
    return rows

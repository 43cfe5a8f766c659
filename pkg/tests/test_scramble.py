"""Scenario orchestration: anchors, symmetries, policies, cage comparison."""

import numpy as np
import pytest

from scramblescope.models import ModelSpec, draw_disorder
from scramblescope.qhilbert import SiteSubset
from scramblescope.scramble import (
    LN_4_3,
    ScrambleScenario,
    default_perturbation_site,
    default_time_grid,
    exact_chi2_pair,
    exact_metric_grid,
    mbl_cage_compare,
    prepare_ensemble,
    qualifying_subsets,
    shadow_metric_curve,
)


def scenario(kind="TFIM", L=6, site=None, size=2, times=(0.0,), **kw):
    dis = draw_disorder(L) if kind == "MBL" else None
    model = ModelSpec(kind=kind, n_sites=L, couplings={}, disorder=dis)
    if site is None:
        site = default_perturbation_site(kind, L)
    initial = kw.pop("initial_kind", "neel" if kind in ("PXP", "MBL") else "polarized")
    return ScrambleScenario(
        model=model,
        initial_kind=initial,
        perturbation_site=site,
        subsystem_size=size,
        time_grid=np.asarray(times, dtype=float),
        **kw,
    )


class TestScenarioValidation:
    def test_rejects_bad_site(self):
        with pytest.raises(ValueError):
            scenario(site=9)

    def test_rejects_bad_policy(self):
        with pytest.raises(ValueError):
            scenario(subset_policy="nearest")

    def test_rejects_bad_metric(self):
        with pytest.raises(ValueError):
            scenario(metrics=("renyi",))

    def test_rejects_decreasing_grid(self):
        with pytest.raises(ValueError):
            scenario(times=(1.0, 0.5))

    def test_echo_is_json_ready(self):
        import json

        echo = scenario(kind="MBL").scenario_echo()
        json.dumps(echo)
        assert echo["units"] == "nats"
        assert "disorder" in echo


class TestDefaults:
    def test_time_grid(self):
        g = default_time_grid()
        assert g[0] == 0.0 and g[-1] == 30.0 and len(g) == 301

    def test_pxp_site_is_active(self):
        assert default_perturbation_site("PXP", 10) == 4
        assert default_perturbation_site("PXP", 8) == 4
        assert default_perturbation_site("TFIM", 10) == 5


class TestPrepareEnsemble:
    def test_states_differ_by_one_flip(self):
        psi1, psi2 = prepare_ensemble(scenario())
        assert abs(np.vdot(psi1.amplitudes, psi2.amplitudes)) < 1e-14

    def test_pxp_rejects_inactive_site(self):
        with pytest.raises(ValueError):
            prepare_ensemble(scenario(kind="PXP", L=6, site=3))

    def test_pxp_rejects_polarized(self):
        with pytest.raises(ValueError):
            prepare_ensemble(scenario(kind="PXP", L=6, site=2, initial_kind="polarized"))


class TestQualifyingSubsets:
    def test_windows_are_contiguous(self):
        subs = qualifying_subsets(scenario(L=5, size=2))
        assert [s.indices for s in subs] == [(0, 1), (1, 2), (2, 3), (3, 4)]

    def test_all_subsets_count(self):
        subs = qualifying_subsets(scenario(L=5, size=2, subset_policy="all_subsets"))
        assert len(subs) == 10

    def test_cap_enforced(self):
        s = scenario(L=8, size=4, subset_policy="all_subsets", subset_cap=10)
        with pytest.raises(RuntimeError):
            qualifying_subsets(s)


class TestExactGrid:
    def test_t0_anchor_all_models(self):
        for kind, L in (("TFIM", 6), ("MFIM", 6), ("PXP", 8), ("MBL", 6)):
            s = scenario(kind=kind, L=L)
            g = exact_metric_grid(s)
            x = s.perturbation_site
            near = {x - 1, x, x + 1}
            for c in range(L):
                v = g.values[0, 0, c]
                if c in near:
                    assert abs(v - LN_4_3) < 1e-10, (kind, c)
                else:
                    assert abs(v) < 1e-10, (kind, c)

    def test_mirror_symmetry_tfim(self):
        # odd chain, central perturbation: the reflection x -> L-1-x is an
        # exact symmetry of the uniform-coupling chain
        L = 9
        s = scenario(kind="TFIM", L=L, site=4, times=(0.0, 1.0, 2.5))
        g = exact_metric_grid(s)
        for ti in range(3):
            row = g.values[0, ti]
            assert np.max(np.abs(row - row[::-1])) < 1e-9

    def test_all_metrics_reported_nonnegative(self):
        s = scenario(kind="TFIM", L=5, times=(0.7,), metrics=("chi2", "holevo", "chi_q"))
        g = exact_metric_grid(s)
        assert g.values.shape == (3, 1, 5)
        assert np.min(g.values) >= 0.0

    def test_holevo_bounds_chi2_and_chi_q(self):
        s = scenario(kind="TFIM", L=5, times=(0.9,), metrics=("chi2", "holevo", "chi_q"))
        g = exact_metric_grid(s)
        chi2_row, holevo_row, chiq_row = g.values[:, 0, :]
        assert np.all(chi2_row <= holevo_row + 1e-9)
        assert np.all(chiq_row <= holevo_row + 1e-9)

    def test_all_subsets_single_column(self):
        s = scenario(kind="TFIM", L=5, times=(0.0,), subset_policy="all_subsets")
        g = exact_metric_grid(s)
        assert g.values.shape == (1, 1, 1)
        assert abs(g.values[0, 0, 0] - LN_4_3) < 1e-10


class TestExactChi2Pair:
    def test_matches_ensemble_route(self):
        from scramblescope.infotheory import Ensemble, chi2
        from scramblescope.qhilbert import partial_trace

        s = scenario(kind="TFIM", L=5, times=(1.3,))
        psi1, psi2 = prepare_ensemble(s)
        from scramblescope.evolve import evolve, make_propagator
        from scramblescope.models import build_hamiltonian

        p = make_propagator(build_hamiltonian(s.model))
        a, b = evolve(p, psi1, 1.3), evolve(p, psi2, 1.3)
        sub = SiteSubset([1, 2])
        r1, r2 = partial_trace(a, sub), partial_trace(b, sub)
        direct = exact_chi2_pair(r1, r2)
        via_ensemble = chi2(Ensemble([(0.5, r1), (0.5, r2)]))
        assert abs(direct - via_ensemble) < 1e-12


class TestShadowCurve:
    def test_tracks_exact_small_case(self):
        s = scenario(
            kind="TFIM", L=4, size=2, times=(0.0, 1.0), shots=1500, master_seed=5
        )
        rows = shadow_metric_curve(s)
        assert len(rows) == 2
        for r in rows:
            assert abs(r["chi2_shadow"] - r["chi2_exact"]) < 0.15

    def test_deterministic(self):
        s = scenario(kind="TFIM", L=4, size=1, times=(0.5,), shots=400, master_seed=9)
        a = shadow_metric_curve(s)
        b = shadow_metric_curve(s)
        assert a == b

    def test_requires_shots(self):
        with pytest.raises(ValueError):
            shadow_metric_curve(scenario(kind="TFIM", L=4))


class TestMblCage:
    def test_decoupled_control_identical(self):
        L = 6
        s = scenario(kind="MBL", L=L, site=2, size=2, times=(0.0, 2.0, 5.0))
        cage = SiteSubset([1, 2, 3])
        rows = mbl_cage_compare(L, cage, s, boundary_coupling_scale=0.0)
        for r in rows:
            assert abs(r["chi2_full"] - r["chi2_cage"]) < 1e-8

    def test_full_coupling_differs_eventually(self):
        L = 6
        s = scenario(kind="MBL", L=L, site=2, size=2, times=(0.0, 10.0, 20.0))
        cage = SiteSubset([1, 2, 3])
        rows = mbl_cage_compare(L, cage, s, boundary_coupling_scale=1.0)
        diffs = [abs(r["chi2_full"] - r["chi2_cage"]) for r in rows]
        assert diffs[0] < 1e-10  # identical at t=0
        assert max(diffs) > 1e-6  # leakage is visible at late times

    def test_rejects_noncontiguous_cage(self):
        s = scenario(kind="MBL", L=6, site=2)
        with pytest.raises(ValueError):
            mbl_cage_compare(6, SiteSubset([1, 3, 4]), s)

    def test_rejects_cage_missing_site(self):
        s = scenario(kind="MBL", L=6, site=0)
        with pytest.raises(ValueError):
            mbl_cage_compare(6, SiteSubset([2, 3, 4]), s)

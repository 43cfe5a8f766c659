"""Clifford enumeration, 2-design identities, and sampled purity inversion."""

import itertools

import numpy as np
import pytest

from scramblescope.cliffordverify import (
    CliffordCircuit,
    circuit_unitary,
    clifford_convergence_experiment,
    enumerate_c1,
    purity_from_basis_sampling,
    random_clifford_circuit,
    same_up_to_phase,
    summarize_convergence,
)
from scramblescope.infotheory import random_density
from scramblescope.models import ModelSpec
from scramblescope.qhilbert import HADAMARD, PAULI_X, PAULI_Y, PAULI_Z, PHASE_S
from scramblescope.scramble import ScrambleScenario


class TestEnumerateC1:
    def test_24_distinct_elements(self):
        elems = enumerate_c1()
        assert len(elems) == 24
        for a, b in itertools.combinations(elems, 2):
            assert not same_up_to_phase(a.matrix, b.matrix)

    def test_all_unitary(self):
        for e in enumerate_c1():
            assert np.max(np.abs(e.matrix @ e.matrix.conj().T - np.eye(2))) < 1e-12

    def test_permutes_pauli_axes(self):
        # every element maps each Pauli to +-another Pauli under conjugation
        paulis = [PAULI_X, PAULI_Y, PAULI_Z]
        for e in enumerate_c1():
            for p in paulis:
                q = e.matrix @ p @ e.matrix.conj().T
                hits = [
                    np.max(np.abs(q - sgn * r)) < 1e-9
                    for r in paulis
                    for sgn in (1, -1)
                ]
                assert any(hits)

    def test_second_moment_matches_haar_twirl(self):
        # 2-design identity: the basis-averaged doubled projector equals the
        # Haar value d * (I + SWAP) / (d (d + 1)) for d = 2
        d = 2
        swap = np.eye(4)[[0, 2, 1, 3]]
        acc = np.zeros((4, 4), dtype=complex)
        for e in enumerate_c1():
            for b in range(d):
                ket = e.matrix.conj().T[:, b]
                proj = np.outer(ket, ket.conj())
                acc += np.kron(proj, proj)
        acc /= 24
        want = d * (np.eye(4) + swap) / (d * (d + 1))
        assert np.max(np.abs(acc - want)) < 1e-12


class TestCircuits:
    def test_unitary_composition_order(self):
        c = CliffordCircuit(1, (("H", (0,)), ("S", (0,))), 2)
        assert np.max(np.abs(circuit_unitary(c) - PHASE_S @ HADAMARD)) < 1e-12

    def test_cnot_action(self):
        c = CliffordCircuit(2, (("CNOT", (0, 1)),), 1)
        u = circuit_unitary(c)
        # control is site 0 (MSB): |10> -> |11>
        v = np.zeros(4)
        v[2] = 1.0
        out = u @ v
        assert abs(out[3] - 1.0) < 1e-12

    def test_random_circuit_unitary(self):
        circ, u = random_clifford_circuit(2, 50, np.random.default_rng(0))
        assert circ.depth == 50 and len(circ.gates) == 50
        assert np.max(np.abs(u @ u.conj().T - np.eye(4))) < 1e-10

    def test_rejects_bad_gates(self):
        with pytest.raises(ValueError):
            CliffordCircuit(2, (("T", (0,)),), 1)
        with pytest.raises(ValueError):
            CliffordCircuit(2, (("CNOT", (1, 1)),), 1)


class TestPurityInversion:
    def test_exact_with_full_group(self):
        rng = np.random.default_rng(1)
        c1 = [e.matrix for e in enumerate_c1()]
        for _ in range(25):
            rho = random_density(2, rng)
            p = float(np.sum(np.abs(rho.matrix) ** 2))
            assert abs(purity_from_basis_sampling(rho, c1) - p) < 1e-12

    def test_two_qubit_circuits_approximate(self):
        rng = np.random.default_rng(2)
        rho = random_density(4, rng)
        p = float(np.sum(np.abs(rho.matrix) ** 2))
        us = [random_clifford_circuit(2, 50, rng)[1] for _ in range(3000)]
        assert abs(purity_from_basis_sampling(rho, us) - p) < 0.05

    def test_rejects_empty(self):
        rho = random_density(2, np.random.default_rng(3))
        with pytest.raises(ValueError):
            purity_from_basis_sampling(rho, [])


class TestConvergenceExperiment:
    def _scenario(self, size):
        return ScrambleScenario(
            model=ModelSpec(kind="PXP", n_sites=6),
            initial_kind="neel",
            perturbation_site=2,
            subsystem_size=size,
            time_grid=np.array([0.0, 1.5]),
        )

    def test_variance_shrinks_with_n(self):
        rows = clifford_convergence_experiment(self._scenario(1), [10, 200], 5)
        summary = summarize_convergence(rows)
        by_key = {(r["t"], r["N"]): r for r in summary}
        for t in (0.0, 1.5):
            assert by_key[(t, 10)]["chi2_std"] > by_key[(t, 200)]["chi2_std"]

    def test_n200_tracks_exact(self):
        rows = clifford_convergence_experiment(self._scenario(2), [200], 3)
        for r in rows:
            assert abs(r["chi2_est"] - r["chi2_exact"]) < 0.15

    def test_deterministic(self):
        a = clifford_convergence_experiment(self._scenario(1), [10], 2)
        b = clifford_convergence_experiment(self._scenario(1), [10], 2)
        assert a == b

    def test_rejects_non_pxp(self):
        s = ScrambleScenario(
            model=ModelSpec(kind="TFIM", n_sites=4),
            initial_kind="polarized",
            perturbation_site=2,
            subsystem_size=1,
            time_grid=np.array([0.0]),
        )
        with pytest.raises(ValueError):
            clifford_convergence_experiment(s, [10], 1)

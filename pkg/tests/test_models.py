"""Hamiltonian builders checked against term-by-term dense oracles."""

import numpy as np
import pytest

from scramblescope.models import (
    DisorderRealization,
    MFIM_G_DEFAULT,
    MFIM_H_DEFAULT,
    ModelSpec,
    PXP_PROJECTOR,
    build_hamiltonian,
    build_mbl,
    build_mfim,
    build_pxp,
    build_tfim,
    draw_disorder,
)
from scramblescope.qhilbert import (
    PAULI_I,
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    bit_of,
)


def embed(ops, L):
    """Oracle Kronecker embedding, written independently of the package."""
    mats = [PAULI_I] * L
    for site, m in ops:
        mats[site] = m
    out = np.ones((1, 1), dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out


class TestTFIM:
    def test_term_by_term_oracle(self):
        L, J, g = 4, 1.0, 0.6
        want = np.zeros((16, 16), dtype=complex)
        for i in range(L - 1):
            want += J * embed([(i, PAULI_Z), (i + 1, PAULI_Z)], L)
        for i in range(L):
            want += g * embed([(i, PAULI_X)], L)
        got = build_tfim(L, J, g).matrix
        assert np.max(np.abs(got - want)) < 1e-14

    def test_l2_spectrum_analytic(self):
        # H = Z Z + g(X I + I X); eigenvalues from the characteristic
        # polynomial worked out by hand: in the |00>,|01>,|10>,|11> basis the
        # matrix couples (00,11) and (01,10) into two 2x2 blocks after the
        # symmetric/antisymmetric split, giving +-sqrt(1+4g^2) and +-1.
        g = 0.6
        w = np.linalg.eigvalsh(build_tfim(2, 1.0, g).matrix)
        want = np.sort([np.sqrt(1 + 4 * g * g), -np.sqrt(1 + 4 * g * g), 1.0, -1.0])
        assert np.allclose(w, want, atol=1e-12)

    def test_g_zero_is_classical(self):
        h = build_tfim(3, 1.0, 0.0).matrix
        assert np.max(np.abs(h - np.diag(np.diag(h)))) < 1e-14

    def test_rejects_short_chain(self):
        with pytest.raises(ValueError):
            build_tfim(1)


class TestMFIM:
    def test_difference_from_tfim_is_bulk_field(self):
        L = 5
        diff = build_mfim(L).matrix - build_tfim(L, 1.0, MFIM_G_DEFAULT).matrix
        want = np.zeros_like(diff)
        for i in range(1, L - 1):
            want += MFIM_H_DEFAULT * embed([(i, PAULI_Z)], L)
        assert np.max(np.abs(diff - want)) < 1e-13

    def test_default_couplings_values(self):
        assert abs(MFIM_G_DEFAULT - (np.sqrt(5) + 5) / 8) < 1e-15
        assert abs(MFIM_H_DEFAULT - (np.sqrt(5) + 1) / 4) < 1e-15

    def test_rejects_short_chain(self):
        with pytest.raises(ValueError):
            build_mfim(2)


class TestMBL:
    def test_term_by_term_oracle(self):
        L = 4
        dis = draw_disorder(L, W=8.0, seed=42)
        sx, sy, sz = PAULI_X / 2, PAULI_Y / 2, PAULI_Z / 2
        want = np.zeros((16, 16), dtype=complex)
        for i in range(L - 1):
            want += embed([(i, sx), (i + 1, sx)], L)
            want += embed([(i, sy), (i + 1, sy)], L)
            want += embed([(i, sz), (i + 1, sz)], L)
        for i in range(L):
            want += dis.fields[i] * embed([(i, sz)], L)
        got = build_mbl(L, disorder=dis).matrix
        assert np.max(np.abs(got - want)) < 1e-12

    def test_disorder_reproducible(self):
        a = draw_disorder(6, W=8.0, seed=42)
        b = draw_disorder(6, W=8.0, seed=42)
        assert np.array_equal(a.fields, b.fields)
        assert np.any(draw_disorder(6, seed=43).fields != a.fields)

    def test_disorder_within_width(self):
        dis = draw_disorder(200, W=8.0, seed=1)
        assert np.all(np.abs(dis.fields) <= 8.0)

    def test_disorder_json_roundtrip(self):
        dis = draw_disorder(5, W=8.0, seed=42)
        back = DisorderRealization.from_json(dis.to_json())
        assert np.array_equal(back.fields, dis.fields)
        assert back.seed == 42 and back.width == 8.0

    def test_bond_scale_severs_chain(self):
        # zeroing bond 1 must make H block-additive across the cut
        L = 4
        dis = draw_disorder(L, seed=2)
        scale = np.array([1.0, 0.0, 1.0])
        h = build_mbl(L, disorder=dis, bond_scale=scale).matrix
        left = build_mbl(
            2,
            disorder=DisorderRealization(dis.fields[:2], 2, "pcg64", 8.0),
        ).matrix
        right = build_mbl(
            2,
            disorder=DisorderRealization(dis.fields[2:], 2, "pcg64", 8.0),
        ).matrix
        want = np.kron(left, np.eye(4)) + np.kron(np.eye(4), right)
        assert np.max(np.abs(h - want)) < 1e-12

    def test_requires_disorder(self):
        with pytest.raises(ValueError):
            build_mbl(4)
        with pytest.raises(ValueError):
            build_mbl(4, disorder=draw_disorder(3))


class TestPXP:
    def test_term_by_term_oracle(self):
        L = 5
        want = np.zeros((32, 32), dtype=complex)
        for i in range(1, L - 1):
            want += embed([(i - 1, PXP_PROJECTOR), (i, PAULI_X), (i + 1, PXP_PROJECTOR)], L)
        want += embed([(0, PAULI_X), (1, PXP_PROJECTOR)], L)
        want += embed([(L - 2, PXP_PROJECTOR), (L - 1, PAULI_X)], L)
        got = build_pxp(L).matrix
        assert np.max(np.abs(got - want)) < 1e-14

    def test_bulk_only_drops_edges(self):
        L = 4
        diff = build_pxp(L).matrix - build_pxp(L, boundary="bulk_only").matrix
        want = embed([(0, PAULI_X), (1, PXP_PROJECTOR)], L) + embed(
            [(L - 2, PXP_PROJECTOR), (L - 1, PAULI_X)], L
        )
        assert np.max(np.abs(diff - want)) < 1e-14

    def test_preserves_blockade_subspace(self):
        # no matrix element connects a constrained state to a state with two
        # adjacent excited (bit 0) sites
        L = 6
        h = build_pxp(L).matrix

        def valid(idx):
            bits = [bit_of(idx, s, L) for s in range(L)]
            return all(not (a == 0 and b == 0) for a, b in zip(bits, bits[1:]))

        good = [i for i in range(2**L) if valid(i)]
        bad = [i for i in range(2**L) if not valid(i)]
        assert np.max(np.abs(h[np.ix_(bad, good)])) == 0.0

    def test_rejects_bad_boundary(self):
        with pytest.raises(ValueError):
            build_pxp(4, boundary="periodic")


class TestModelSpec:
    def test_dispatch_matches_builders(self):
        dis = draw_disorder(4)
        cases = [
            (ModelSpec("TFIM", 4), build_tfim(4)),
            (ModelSpec("MFIM", 4), build_mfim(4)),
            (ModelSpec("PXP", 4), build_pxp(4)),
            (ModelSpec("MBL", 4, disorder=dis), build_mbl(4, disorder=dis)),
        ]
        for spec, want in cases:
            assert np.array_equal(build_hamiltonian(spec).matrix, want.matrix)

    def test_coupling_overrides(self):
        spec = ModelSpec("TFIM", 3, couplings={"J": 2.0, "g": 0.1})
        assert np.array_equal(
            build_hamiltonian(spec).matrix, build_tfim(3, 2.0, 0.1).matrix
        )

    def test_rejects_unknown_kind(self):
        with pytest.raises(ValueError):
            ModelSpec("XXZ", 4)

    def test_mbl_requires_matching_disorder(self):
        with pytest.raises(ValueError):
            ModelSpec("MBL", 4)
        with pytest.raises(ValueError):
            ModelSpec("MBL", 4, disorder=draw_disorder(3))

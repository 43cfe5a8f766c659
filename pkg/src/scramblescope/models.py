"""Builders for the four spin-chain Hamiltonians studied by this package.

All chains are open. TFIM and MFIM use Pauli operators, the disordered
Heisenberg (MBL) chain uses spin-1/2 operators S = sigma/2, and the PXP
chain projects flips onto blockade-respecting neighbors.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .qhilbert import (
    HermitianOperator,
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    kron_embed,
)

MFIM_G_DEFAULT = (math.sqrt(5.0) + 5.0) / 8.0
MFIM_H_DEFAULT = (math.sqrt(5.0) + 1.0) / 4.0
MBL_W_DEFAULT = 8.0
MBL_SEED_DEFAULT = 42

# Projector onto spin down (sigma_z = -1), the state that admits a neighbor flip.
PXP_PROJECTOR = (np.eye(2, dtype=complex) - PAULI_Z) / 2.0

_GENERATORS = ("pcg64",)


@dataclass(frozen=True)
class DisorderRealization:
    """One draw of on-site disorder fields, pinned to a named generator."""

    fields: np.ndarray
    seed: int
    generator_id: str
    width: float

    def __post_init__(self):
        f = np.asarray(self.fields, dtype=float)
        object.__setattr__(self, "fields", f)
        if f.ndim != 1 or f.size == 0:
            raise ValueError("disorder fields must be a nonempty 1-D array")
        if np.any(np.abs(f) > self.width + 1e-12):
            raise ValueError("disorder field outside [-W, W]")

    def to_json(self) -> str:
        return json.dumps(
            {
                "fields": [float(x) for x in self.fields],
                "seed": int(self.seed),
                "generator_id": self.generator_id,
                "W": float(self.width),
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "DisorderRealization":
        d = json.loads(text)
        return cls(
            fields=np.asarray(d["fields"], dtype=float),
            seed=int(d["seed"]),
            generator_id=str(d["generator_id"]),
            width=float(d["W"]),
        )


def draw_disorder(
    L: int,
    W: float = MBL_W_DEFAULT,
    seed: int = MBL_SEED_DEFAULT,
    generator_id: str = "pcg64",
) -> DisorderRealization:
    """Draw L i.i.d. uniform fields on [-W, W], reproducible from the seed."""
    if W <= 0:
        raise ValueError("disorder width W must be positive")
    if generator_id not in _GENERATORS:
        raise ValueError(f"unknown generator_id {generator_id!r}")
    rng = np.random.default_rng(seed)
    fields = rng.uniform(-W, W, size=L)
    return DisorderRealization(fields=fields, seed=seed, generator_id=generator_id, width=W)


@dataclass(frozen=True)
class ModelSpec:
    """Tagged description of one model instance."""

    kind: str
    n_sites: int
    couplings: dict = field(default_factory=dict)
    disorder: DisorderRealization | None = None
    pxp_boundary: str = "open_projected"

    def __post_init__(self):
        if self.kind not in ("TFIM", "MFIM", "PXP", "MBL"):
            raise ValueError(f"unknown model kind {self.kind!r}")
        if self.n_sites < 2:
            raise ValueError("need at least 2 sites")
        for k, v in self.couplings.items():
            if not math.isfinite(float(v)):
                raise ValueError(f"coupling {k} is not finite")
        if self.kind == "MBL":
            if self.disorder is None:
                raise ValueError("MBL model requires a disorder realization")
            if len(self.disorder.fields) != self.n_sites:
                raise ValueError("disorder length does not match chain length")


def build_tfim(L: int, J: float = 1.0, g: float = 0.6) -> HermitianOperator:
    """Transverse-field Ising chain: J sum_z z + g sum_x, open boundaries."""
    if L < 2:
        raise ValueError("TFIM needs L >= 2")
    dim = 2 ** L
    h = np.zeros((dim, dim), dtype=complex)
    for i in range(L - 1):
        h += J * kron_embed([(i, PAULI_Z), (i + 1, PAULI_Z)], L).matrix
    for i in range(L):
        h += g * kron_embed([(i, PAULI_X)], L).matrix
    return HermitianOperator(dim, h)


def build_mfim(
    L: int,
    J: float = 1.0,
    g: float = MFIM_G_DEFAULT,
    h: float = MFIM_H_DEFAULT,
) -> HermitianOperator:
    """Mixed-field Ising chain; the longitudinal field skips both edge sites."""
    if L < 3:
        raise ValueError("MFIM needs L >= 3")
    dim = 2 ** L
    m = build_tfim(L, J, g).matrix.copy()
    for i in range(1, L - 1):
        m += h * kron_embed([(i, PAULI_Z)], L).matrix
    return HermitianOperator(dim, m)


def build_mbl(
    L: int,
    J_perp: float = 1.0,
    J_z: float = 1.0,
    disorder: DisorderRealization | None = None,
    bond_scale: np.ndarray | None = None,
) -> HermitianOperator:
    """Disordered Heisenberg chain with S = sigma/2 operators.

    bond_scale optionally rescales both exchange couplings bond by bond
    (length L-1); used to sever selected bonds for decoupling controls.
    """
    if disorder is None:
        raise ValueError("MBL builder requires a disorder realization")
    if len(disorder.fields) != L:
        raise ValueError(
            f"disorder has {len(disorder.fields)} fields for an L={L} chain"
        )
    if bond_scale is None:
        bond_scale = np.ones(L - 1)
    bond_scale = np.asarray(bond_scale, dtype=float)
    if bond_scale.shape != (L - 1,):
        raise ValueError("bond_scale must have one entry per bond")
    sx, sy, sz = PAULI_X / 2.0, PAULI_Y / 2.0, PAULI_Z / 2.0
    dim = 2 ** L
    h = np.zeros((dim, dim), dtype=complex)
    for i in range(L - 1):
        s = bond_scale[i]
        h += s * J_perp * kron_embed([(i, sx), (i + 1, sx)], L).matrix
        h += s * J_perp * kron_embed([(i, sy), (i + 1, sy)], L).matrix
        h += s * J_z * kron_embed([(i, sz), (i + 1, sz)], L).matrix
    for i in range(L):
        h += disorder.fields[i] * kron_embed([(i, sz)], L).matrix
    return HermitianOperator(dim, h)


def build_pxp(L: int, boundary: str = "open_projected") -> HermitianOperator:
    """Blockade-constrained flip chain: sum_i P_{i-1} X_i P_{i+1}.

    boundary = "open_projected" adds the one-sided edge terms X_0 P_1 and
    P_{L-2} X_{L-1}; "bulk_only" keeps interior terms only.
    """
    if L < 3:
        raise ValueError("PXP needs L >= 3")
    if boundary not in ("open_projected", "bulk_only"):
        raise ValueError(f"unknown PXP boundary convention {boundary!r}")
    dim = 2 ** L
    h = np.zeros((dim, dim), dtype=complex)
    for i in range(1, L - 1):
        h += kron_embed(
            [(i - 1, PXP_PROJECTOR), (i, PAULI_X), (i + 1, PXP_PROJECTOR)], L
        ).matrix
    if boundary == "open_projected":
        h += kron_embed([(0, PAULI_X), (1, PXP_PROJECTOR)], L).matrix
        h += kron_embed([(L - 2, PXP_PROJECTOR), (L - 1, PAULI_X)], L).matrix
    return HermitianOperator(dim, h)


def build_hamiltonian(spec: ModelSpec) -> HermitianOperator:
    c = spec.couplings
    if spec.kind == "TFIM":
        return build_tfim(spec.n_sites, J=c.get("J", 1.0), g=c.get("g", 0.6))
    if spec.kind == "MFIM":
        return build_mfim(
            spec.n_sites,
            J=c.get("J", 1.0),
            g=c.get("g", MFIM_G_DEFAULT),
            h=c.get("h", MFIM_H_DEFAULT),
        )
    if spec.kind == "MBL":
        return build_mbl(
            spec.n_sites,
            J_perp=c.get("J_perp", 1.0),
            J_z=c.get("J_z", 1.0),
            disorder=spec.disorder,
        )
    return build_pxp(spec.n_sites, boundary=spec.pxp_boundary)

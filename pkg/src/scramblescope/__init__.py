"""Exact spin-chain dynamics and randomized-measurement probes of scrambling."""

__version__ = "0.1.0"

from .qhilbert import (  # noqa: F401
    DensityOperator,
    HermitianOperator,
    SiteSubset,
    Spectrum,
    StateVector,
    apply_local_unitary,
    basis_state,
    born_sample,
    eigensystem,
    kron_embed,
    partial_trace,
    purity,
    spectrum_of,
)
from .models import (  # noqa: F401
    DisorderRealization,
    ModelSpec,
    build_hamiltonian,
    build_mbl,
    build_mfim,
    build_pxp,
    build_tfim,
    draw_disorder,
)
from .evolve import Propagator, evolve, make_propagator  # noqa: F401
from .infotheory import (  # noqa: F401
    Ensemble,
    chi2,
    chi_q,
    haar_moment_mc,
    holevo_chi,
    q2_contour,
    q2_purity,
    q2_spectral,
    subentropy,
    von_neumann,
)
from .shadows import (  # noqa: F401
    Chi2Estimate,
    MoMConfig,
    ShadowSet,
    Snapshot,
    chi2_estimate,
    kernel_value,
    median_of_means,
    overlap_estimate,
    pair_kernel,
    purity_estimate,
    sample_shadow_set,
    sample_snapshot,
)
from .scramble import (  # noqa: F401
    GridResult,
    ScrambleScenario,
    exact_metric_grid,
    mbl_cage_compare,
    prepare_ensemble,
    shadow_metric_curve,
)
from .cliffordverify import (  # noqa: F401
    CliffordCircuit,
    CliffordElement,
    clifford_convergence_experiment,
    enumerate_c1,
    purity_from_basis_sampling,
    random_clifford_circuit,
)

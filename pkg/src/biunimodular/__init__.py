"""Dual-unitary gates and perfect tensors from biunimodular phase arrays."""

__version__ = "0.1.0"

from .arrays import (
    ModularSolutionSet,
    PhaseArray,
    autocorrelation,
    balance_check,
    correlation_residual,
    correlation_spectrum,
    fourier_transform,
    gauss_product,
    gauss_sequence,
    is_biunimodular,
    known_vector,
    known_vectors,
    modular_solutions_dual,
    modular_solutions_tdual,
    quadratic_ansatz,
    tensor_product,
    two_qubit_family,
    two_qubit_pairing,
    weighted_autocorrelation,
)
from .certification import (
    CertificationReport,
    block_structure,
    certify,
    lu_probe,
    stabilizer_check,
)
from .diagonal import (
    build_diagonal_unitary,
    chm_construct,
    circuit_description,
    controlled_decomposition,
    extract_phase_array,
    max_ent_basis,
    schmidt_form,
    swap_from_phase_vector,
    swap_phase_vector,
    symmetric_variant,
)
from .linalg import (
    delta,
    fourier_gate,
    frobenius_dist_to_unitary,
    partial_transpose,
    polar_factor,
    polar_nearest_unitary,
    realign,
    swap_gate,
    weyl,
)
from .search import (
    SearchConfig,
    SearchOutcome,
    biuni_step,
    biuni_swap_step,
    polar_map_GammaR,
    polar_map_R,
    random_phase_array,
    run_ensemble,
    run_search,
    search_perfect,
)

"""Separable-state construction and certification for bipartite systems.

Build states from upper-triangular operator-matrix data, verify the
row-commutation (semi-SSPPT) sufficient condition, and emit explicit,
machine-checkable product ensembles; includes finite-rank witness machinery
for the entangled complement.
"""

from .backend import available_backends, get_backend, set_backend
from .bipartite import (
    BipartiteOperator,
    StateCheck,
    blocks,
    check_state,
    embed,
    from_blocks,
    is_ppt,
    kron,
    partial_trace,
    partial_transpose,
    swap_subsystems,
    trace_distance,
    truncate,
)
from .cholesky import (
    CholeskyCertificate,
    SemiSspptReport,
    assemble_factor,
    assemble_state,
    block_cholesky,
    check_transpose_refactorization,
    extract_operators,
    grid_matrix,
    verify_semi_ssppt,
)
from .decompose import (
    JointEigenbasis,
    ProductEnsemble,
    ProductTerm,
    RowComponent,
    component_operator,
    douglas_solve,
    extract_ensemble,
    joint_diagonalize,
    qubit_pathway,
    reconstruct,
    row_split,
)
from .generators import (
    GeneratorSpec,
    example1_state,
    example2_state,
    generate,
    geometric_tail,
    maximally_entangled,
    random_density,
    random_semi_ssppt,
    random_unitary,
)
from .linalg import (
    Spectral,
    commutator_residual,
    hermitian_eig,
    norms,
    op_norm,
    pinv,
    psd_sqrt,
    qr_upper,
    singular_values,
    trace_norm,
)
from .rng import Prng, derive_seed
from .witnesses import WitnessReport, npt_witness, product_pairing_min

__version__ = "0.1.0"

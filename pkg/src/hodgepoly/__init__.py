"""Exact polynomial solutions of Hodge-de Rham and generalized Moisil-Théodoresco systems."""

from .exterior_poly import (
    FormSpace,
    InvalidDescriptor,
    PolyForm,
    contract_step,
    enumerate_blades,
    enumerate_monomials,
    fischer_inner,
    hodge_star,
    multiply_by_r2,
    wedge_step,
)
from .gmt import (
    ComponentNotHodge,
    GradeRange,
    HodgeTuple,
    NotClosed,
    NotCoclosed,
    NotInMT,
    c_formula,
    lift_hodge_tuple,
    mt_dim_formula,
    mt_space,
    phi_split,
    poincare_primitive_d,
    poincare_primitive_dstar,
)
from .linalg import (
    DimensionCapExceeded,
    Subspace,
    contains,
    image,
    intersect,
    kernel,
    ortho_complement_within,
    solve,
    subspace_sum,
)
from .operators import (
    OperatorMatrix,
    apply,
    d_matrix,
    dirac_block_matrix,
    dstar_matrix,
    laplacian_matrix,
    phi_matrix,
)
from .spaces import (
    fisher_strata,
    harmonic_kernel,
    highest_weight_label,
    hodge_dim_formula,
    hodge_space,
    kernel_stratification,
    uvw_decomposition,
)

__version__ = "0.1.0"

"""Coulomb-Sturmian matrix elements of the Coulomb Green's operator."""
from .errors import (
    ConvergenceError,
    CutProximity,
    DegenerateEnergy,
    NearCutWarning,
    NearSingular,
    NoSignChange,
    PoleAtEnergy,
)
from .green import (
    TFractionMatch,
    cn_closed_form,
    cn_direct,
    cn_forward_recursion,
    euler_transform_check,
    g00,
    greens_matrix_inversion_exact,
    greens_matrix_recursive,
    match_tfraction_params,
)
from .jacobi import (
    ComplexEnergy,
    GreensMatrix,
    PhysicalParams,
    Route,
    TridiagonalMatrix,
    cs_basis_function,
    greens_matrix_by_inversion,
    greens_matrix_plain,
    jmatrix_element,
    solve_tridiagonal,
    truncated_jmatrix,
)
from .specfun import (
    CFResult,
    CFTerms,
    Hyp2F1Params,
    assoc_laguerre,
    eval_continued_fraction,
    hyp2f1_ratio,
    hyp2f1_series,
)
from .spectrum import BoundState, analytic_spectrum, locate_pole, pole_order_probe

__version__ = "0.1.0"

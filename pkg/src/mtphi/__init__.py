"""Mixed Tate filtered (phi, N)-modules over p-adic fields as matrix data."""

from .errors import (
    DomainError,
    InsufficientPrecision,
    MtphiError,
    NotAUnit,
    NotInvertible,
    NotMixedTate,
    NotMixedTatePhi,
    NotMTHS,
    NotUnipotent,
    ValidationError,
    WrongShape,
    ZeroValuation,
)
from .padic import (
    LocalField,
    Scalar,
    branch_log,
    scalar_from_rational,
    teichmuller,
    unit_log,
    val,
)
from .filmod import (
    FilPhiNModule,
    Morphism,
    Polygon,
    SlopeDecomposition,
    check_weight_exactness,
    cokernel,
    dual,
    gr_weight,
    hodge_polygon,
    hom_space,
    is_mixed_tate,
    kernel,
    make_module,
    mt_criterion,
    newton_polygon,
    slope_decomposition,
    tate_object,
    tate_twist,
    tensor,
    validate,
    weight_sub,
)
from .logpoint import (
    EtaMatrix,
    KstPoly,
    baer_sum,
    eta,
    eta_st,
    eta_via_deligne,
    ext_build,
    ext_class,
    is_crystalline,
    kummer_module,
    log_st,
    transport_filtration,
)
from .grading import (
    CEtaObject,
    LieProfile,
    generator_action,
    grade_action,
    lie_dims,
    nilpotent_exp,
    nilpotent_log,
    phi_inv,
    psi,
    reconstruct_eta,
)
from .archimedean import RealMTHS, bd_value, compute_d, epsilon_arch, polylog

__version__ = "0.1.0"

"""Matrix decompositions over the dual quaternion ring."""
from .dense import (DQMatrix, col_norms, complete_unitary, conj_transpose, inner_product,
                    is_unitary, matmul, max_residual, rank_and_arank, vec_norm2)
from .errors import (ConvergenceFailure, DimensionMismatch, DQError, Negative, NotAppreciable,
                     NotIsometry, NotSquare, NotUnitary, PreconditionViolated, ZeroMatrix,
                     ZeroPencil, ZeroVector)
from .estimators import CCD, DQSVD, GSVD1, GSVD2, PSVD, CSDecomposition, PivotedQR, ProductSVD
from .factor_cs import cs_decompose_2x1, cs_decompose_2x2, weak_orth_triangularize
from .factor_gsvd import dqgsvd1_cs, dqgsvd1_regular, dqgsvd2
from .factor_psvd_ccd import dqccd, dqpsvd, pre_psvd, product_svd
from .factor_qr import (full_rank_decomposition, householder_annihilate, qr, qr_pivoted,
                        unitary_decomposition)
from .factor_svd import dqsvd, quat_svd
from .scalar import (DEFAULT_TOL, DualNumber, DualQuaternion, Quaternion, ToleranceConfig,
                     dn_abs, dn_cmp, dn_inv, dn_mul, dn_sqrt)

__version__ = "0.1.0"

from .copying import (
    LAX_UNSUPPORTED, Cogebra, CofreeInspired, Fock, FullCopy, Modality, ModalityError, cofree_delta,
    cogebra_delta, counit_e, full_delta, lax_m, parse_modality,
)
from .fock import (
    FockError, FockTensor, fock_counit, fock_dim, fock_dual_codelta, fock_eps, fock_group_delta, format_fock,
    multiplication_matrix, multiplication_table, parse_fock, wedge_product, wedge_sign,
)

__all__ = [
    'LAX_UNSUPPORTED', 'Cogebra', 'CofreeInspired', 'Fock', 'FullCopy', 'Modality', 'ModalityError',
    'cofree_delta', 'cogebra_delta', 'counit_e', 'full_delta', 'lax_m', 'parse_modality',
    'FockError', 'FockTensor', 'fock_counit', 'fock_dim', 'fock_dual_codelta', 'fock_eps', 'fock_group_delta',
    'format_fock', 'multiplication_matrix', 'multiplication_table', 'parse_fock', 'wedge_product', 'wedge_sign',
]

"""trcalc: exact coefficient charts and descent spectral sequences for TR
of polynomial rings over F_p."""

from .arith import PGroup, PMatrix, PresentedModule, homology, smith_normal_form

__all__ = [
    "PGroup",
    "PMatrix",
    "PresentedModule",
    "homology",
    "smith_normal_form",
]

__version__ = "0.1.0"

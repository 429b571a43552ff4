"""Desk-scale machinery for extreme values of derivatives of cyclotomic
Dedekind zeta functions: coefficient arithmetic, layered GCD-sum sets,
resonance kernels and resonators, and numerical zeta evaluation tied
together by exact convolution identities.
"""

__version__ = "0.1.0"

from .backend import BACKEND_NAME
from .fields import FieldSpec

__all__ = ["FieldSpec", "BACKEND_NAME", "__version__"]

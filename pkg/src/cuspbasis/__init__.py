"""cuspbasis: explicit orthogonal bases of spaces of cusp forms.

Closed-form Petersson products of newform translates, per-prime
orthogonal bases assembled across levels, independent numeric
verification by quadrature over coset-decomposed fundamental domains,
and explicit Fourier-coefficient bounds.
"""

__version__ = "0.1.0"

from ._kernels import backend_name

__all__ = ["backend_name", "__version__"]

"""chrep: an exact workbench for Cayley-Hamilton algebras, pseudorepresentations,
generalized matrix algebras, and deformation conditions over Z/p^n.

All arithmetic is exact (Python integers, prime-power moduli); every
construction is backed by enumeration-based oracles at desk scale.
"""

__version__ = "0.1.0"

from ._kernels import IMPLEMENTATION as KERNEL_IMPLEMENTATION

__all__ = ["KERNEL_IMPLEMENTATION", "__version__"]

"""Kernel selection: compiled Cython module if built, else the reference.

``chrep._kernels.howell_complete`` / ``matmul_mod`` are the only symbols
the rest of the package uses; both backends implement the identical
contract (see ``reference``).  Set CHREP_PURE=1 to force the fallback.
"""

from __future__ import annotations

import os

from . import reference

if os.environ.get("CHREP_PURE"):
    _impl = reference
else:
    try:
        from . import _fast as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = reference

IMPLEMENTATION = _impl.IMPLEMENTATION
howell_complete = _impl.howell_complete
matmul_mod = _impl.matmul_mod

# always exported from the reference: tiny scalar helpers
modinv = reference.modinv
unit_factor = reference.unit_factor
gcdex_rows = reference.gcdex_rows

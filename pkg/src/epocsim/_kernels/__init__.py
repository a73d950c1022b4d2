"""Backend selection for the hot kernels.

The env var ``EPOCSIM_BACKEND`` picks the implementation:

* ``auto`` (default) - numba when importable, else the pure-numpy fallback
* ``numba``          - require the jitted kernels, fail if numba is missing
* ``numpy``          - force the fallback (useful for debugging and benchmarks)

``BACKEND`` records which one actually loaded.
"""

import os

_requested = os.environ.get("EPOCSIM_BACKEND", "auto").strip().lower()

if _requested not in ("auto", "numba", "numpy"):
    raise ValueError(
        f"EPOCSIM_BACKEND must be one of auto|numba|numpy, got {_requested!r}"
    )

if _requested == "numpy":
    from . import numpy_impl as _impl

    BACKEND = "numpy"
else:
    try:
        from . import numba_impl as _impl

        BACKEND = "numba"
    except ImportError:
        if _requested == "numba":
            raise
        from . import numpy_impl as _impl

        BACKEND = "numpy"

sosfilt = _impl.sosfilt
pack_frame = _impl.pack_frame
unpack_frame = _impl.unpack_frame

__all__ = ["BACKEND", "sosfilt", "pack_frame", "unpack_frame"]

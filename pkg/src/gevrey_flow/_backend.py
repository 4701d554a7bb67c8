"""Kernel backend selection.

The hot inner loops (direct truncated convolution and the fused-exponential
bilinear sum) ship in two implementations: a numba ``@njit`` one and a
vectorised pure-numpy one.  The environment variable ``GEVREY_FLOW_BACKEND``
selects between them:

    GEVREY_FLOW_BACKEND=numba   force the compiled kernels (error if numba
                                cannot be imported)
    GEVREY_FLOW_BACKEND=numpy   force the pure-numpy fallback

Unset, the compiled kernels are used whenever numba imports cleanly.

``GEVREY_FLOW_THREADS`` caps the numba threading layer (the kernels
themselves are serial, so this only matters for future parallel kernels and
for honouring the documented parallelism cap).
"""

import os

try:
    import numba

    _NUMBA_AVAILABLE = True
except Exception:  # pragma: no cover - exercised only on broken installs
    numba = None
    _NUMBA_AVAILABLE = False


def resolve_backend(env_value, numba_available):
    """Map the raw environment value to a backend name, validating it."""
    value = (env_value or "").strip().lower()
    if value == "":
        return "numba" if numba_available else "numpy"
    if value == "numpy":
        return "numpy"
    if value == "numba":
        if not numba_available:
            raise RuntimeError(
                "GEVREY_FLOW_BACKEND=numba requested but numba is not importable"
            )
        return "numba"
    raise ValueError(
        f"GEVREY_FLOW_BACKEND must be 'numba' or 'numpy', got {env_value!r}"
    )


BACKEND = resolve_backend(os.environ.get("GEVREY_FLOW_BACKEND"), _NUMBA_AVAILABLE)
USE_NUMBA = BACKEND == "numba"


def thread_cap():
    """Parallelism cap from GEVREY_FLOW_THREADS (None when unset)."""
    raw = os.environ.get("GEVREY_FLOW_THREADS")
    if raw is None or raw.strip() == "":
        return None
    cap = int(raw)
    if cap < 1:
        raise ValueError("GEVREY_FLOW_THREADS must be a positive integer")
    return cap


if USE_NUMBA:
    _cap = thread_cap()
    if _cap is not None:
        try:
            numba.set_num_threads(min(_cap, numba.config.NUMBA_NUM_THREADS))
        except ValueError:  # pragma: no cover - single-core hosts
            pass

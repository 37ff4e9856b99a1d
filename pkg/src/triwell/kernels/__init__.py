"""Hot-loop kernels with a compiled core and a pure-numpy fallback.

The compiled extension accelerates the two per-point sweeps of the
equilibrium solver (variant-energy softmax and the per-mode Green
application).  Selection happens once at import time; set TRIWELL_FORCE_PY=1
to force the numpy fallback (used by the benchmark and the parity tests).
"""

import os

from . import _numpy

if os.environ.get("TRIWELL_FORCE_PY"):
    _backend = _numpy
else:
    try:
        from . import _core as _backend  # type: ignore[attr-defined]
    except ImportError:
        _backend = _numpy

BACKEND = _backend.NAME
constitutive_sweep = _backend.constitutive_sweep
green_sweep = _backend.green_sweep

numpy_backend = _numpy

"""Selection of the likelihood kernel implementation.

The compiled ``_ckernels`` extension is used when it was built; otherwise the
numpy implementation in ``_pykernels`` is loaded.  Setting the environment
variable ``WGED_PURE_PYTHON=1`` forces the fallback at import time.  Callers
reach the kernels through ``backend.active`` so :func:`set_backend` takes
effect everywhere.
"""

import os

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_AVAILABLE = {"python": _pykernels}
if _ckernels is not None:
    _AVAILABLE["cython"] = _ckernels

if os.environ.get("WGED_PURE_PYTHON", "").strip() not in ("", "0") or _ckernels is None:
    active = _pykernels
else:
    active = _ckernels


def available():
    """Names of the kernel implementations importable in this environment."""
    return sorted(_AVAILABLE)


def name():
    return active.NAME


def get(name):
    try:
        return _AVAILABLE[name]
    except KeyError:
        raise ValueError(f"kernel backend {name!r} is not available "
                         f"(have {available()})") from None


def set_backend(name):
    """Switch the active kernels; returns the previously active name."""
    global active
    previous = active.NAME
    active = get(name)
    return previous

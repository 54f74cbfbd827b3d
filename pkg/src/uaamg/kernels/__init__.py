"""Hot-kernel backend selection.

The numba backend is the default; set ``UAAMG_KERNELS=numpy`` to force the
pure-numpy fallback (or ``UAAMG_KERNELS=numba`` to fail loudly when numba
is unavailable). Both backends implement the same contracts; the benchmark
``python -m uaamg.bench`` compares them.
"""

import os

_ENV_VAR = "UAAMG_KERNELS"


def _load(name):
    if name == "numpy":
        from . import numpy_backend as mod
    elif name == "numba":
        from . import numba_backend as mod
    else:
        raise ValueError(f"unknown kernel backend {name!r} (expected 'numba' or 'numpy')")
    return mod


def get_backend(name=None):
    """Return a kernel backend module by name, or the env-selected default."""
    if name is not None:
        return _load(name)
    requested = os.environ.get(_ENV_VAR, "").strip().lower()
    if requested:
        return _load(requested)
    try:
        return _load("numba")
    except ImportError:
        return _load("numpy")


_active = get_backend()

backend_name = _active.NAME
set_num_threads = _active.set_num_threads
hash_u01 = _active.hash_u01
spmv = _active.spmv
diag_of = _active.diag_of
l1_diag = _active.l1_diag
degrees = _active.degrees
quasi_random_scores = _active.quasi_random_scores
squared_pattern = _active.squared_pattern
galerkin_coo = _active.galerkin_coo
select_centers = _active.select_centers
claim_owners = _active.claim_owners
admit_members = _active.admit_members
restrict = _active.restrict
prolongate_add = _active.prolongate_add
smooth_sweeps = _active.smooth_sweeps

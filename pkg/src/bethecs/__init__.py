"""
Bethe ansatz for inhomogeneous XXX chains with fusion, exact Dunkl/Jack
algebra, Heisenberg-style charges of the fermionic spin-Calogero-Sutherland
model, and their freezing to the Haldane-Shastry chain.

Set BETHECS_THREADS to cap the BLAS thread pool.
"""

import os as _os

_threads = _os.environ.get("BETHECS_THREADS")
if _threads:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        _os.environ.setdefault(_var, _threads)

__version__ = "0.1.0"

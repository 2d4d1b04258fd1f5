"""Kernel backend selection.

The compiled Cython extension is preferred when present; the pure
NumPy/Python twin is the fallback.  ``PRODNORM_BACKEND=pure`` forces the
fallback (useful for benchmarking and debugging).
"""

import os

from . import _pure

if os.environ.get("PRODNORM_BACKEND", "").lower() == "pure":
    _impl = _pure
else:
    try:
        from . import _corex as _impl
    except ImportError:
        _impl = _pure

BACKEND = _impl.BACKEND

kv_scaled = _impl.kv_scaled
kv_scaled_many = _impl.kv_scaled_many
kv_scaled_pair_many = _impl.kv_scaled_pair_many
sample_rep = _impl.sample_rep
sample_quadform = _impl.sample_quadform
uniforms = _impl.uniforms
normals = _impl.normals
gammas = _impl.gammas
sym_eigvals = _impl.sym_eigvals
stream_seed = _pure.stream_seed  # integer mixing; no need for a compiled twin

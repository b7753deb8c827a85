"""Decoder kernel selection: compiled extension if available, NumPy otherwise.

Set ``SKGSIM_PURE_PYTHON=1`` to force the fallback (used by the benchmark and
the cross-check tests).  Both kernels are exact ML decoders with identical
integer arithmetic, so outputs are bit-identical.
"""

import os

from . import _viterbi_py

try:
    from . import _viterbi_c
except ImportError:
    _viterbi_c = None

if _viterbi_c is not None and os.environ.get("SKGSIM_PURE_PYTHON", "") not in ("1", "true"):
    tb_viterbi_decode = _viterbi_c.tb_viterbi_decode
    BACKEND = "c"
else:
    tb_viterbi_decode = _viterbi_py.tb_viterbi_decode
    BACKEND = "python"


def available_backends():
    """Name -> decode function, for benchmarks and equivalence tests."""
    out = {"python": _viterbi_py.tb_viterbi_decode}
    if _viterbi_c is not None:
        out["c"] = _viterbi_c.tb_viterbi_decode
    return out

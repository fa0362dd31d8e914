"""Backend selection for the hot simulation loops.

The compiled extension is preferred when it imported cleanly; set the
environment variable ``ELASTICBM_NO_EXT=1`` before import to force the
pure-numpy fallback (used by the benchmark and the equivalence tests).
"""
import os

from . import _pyref

if os.environ.get("ELASTICBM_NO_EXT"):
    _impl = _pyref
    BACKEND = "numpy"
else:
    try:
        from . import _fast as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _pyref
        BACKEND = "numpy"

bang_bang_chunk = _impl.bang_bang_chunk
bang_bang_path = _impl.bang_bang_path
bm_max_chunk = _impl.bm_max_chunk
passage_chunk = _impl.passage_chunk

"""Noise-decoupling control synthesis for Markovian open quantum systems.

The package wraps the C++ core: su(N) basis and Cartan-split construction,
coherence-vector form of the master equation, the stationary control solve,
trajectory integration with a density-matrix cross-check, the exact-decoupling
comparator, and the scenario runner behind the command-line tool.
"""

import os
import sys

_ext_dir = os.environ.get("QDECOUPLE_EXT_DIR")
if _ext_dir and _ext_dir not in sys.path:
    # Development builds: pick up _core from the CMake build tree.
    sys.path.insert(0, _ext_dir)
    from _core import *  # noqa: F401,F403
    from _core import __doc__ as _core_doc
else:
    from qdecouple._core import *  # noqa: F401,F403
    from qdecouple._core import __doc__ as _core_doc

__all__ = [name for name in dir() if not name.startswith("_")]

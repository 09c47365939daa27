"""Python façade over the C++ engine.

The extension module lives inside the installed package; during an in-tree
CMake build it sits on PYTHONPATH as a top-level module instead.
"""

try:
    from ._freeclt import *  # noqa: F401,F403
except ImportError:  # in-tree build layout
    from _freeclt import *  # noqa: F401,F403

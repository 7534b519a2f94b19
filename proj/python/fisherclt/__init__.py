"""Grid-based Fisher information, Poincare constants, and O(1/n) rate checks.

The heavy lifting lives in the compiled extension; this package re-exports
its surface.  See ``help(fisherclt._core)`` for the function list.
"""

try:
    from fisherclt._core import *  # noqa: F401,F403  (installed layout)
    from fisherclt import _core as _core_module
except ImportError:  # in-tree layout: extension built next to the sources
    from _core import *  # noqa: F401,F403
    import _core as _core_module

__version__ = "0.1.0"
__all__ = [name for name in dir(_core_module) if not name.startswith("_")]

"""Nonlinear normal modes, quadrature curves and force appropriation for
two-mode nonlinear modal models.

The compiled extension carries all functionality; this package re-exports it.
"""

try:
    from ._nnma import *          # noqa: F401,F403  (installed layout)
    from ._nnma import __version__  # noqa: F401
except ImportError:               # in-tree builds place _nnma on sys.path
    from _nnma import *           # noqa: F401,F403
    from _nnma import __version__  # noqa: F401

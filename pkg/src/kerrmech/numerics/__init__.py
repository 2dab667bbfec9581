"""Shared numerical kernels: polynomial roots, small dense eigenvalues,
linear solves, Lyapunov solves and linear-ODE propagation.

Two interchangeable backends implement the same contracts:

* ``_kernels_cy``: Cython extension compiled at install time (hot path),
* ``_kernels_py``: numpy/scipy fallback, always available.

The compiled backend is preferred when importable.  Set the environment
variable ``KERRMECH_NUMERICS=pure`` (or ``compiled``) to force a choice;
forcing ``compiled`` raises if the extension was not built.

The physics modules call only these kernels, never platform linear algebra
directly, so the whole pipeline can be exercised against either backend.
"""

import os
from dataclasses import dataclass

__all__ = [
    "BACKEND",
    "ToleranceSet",
    "poly_roots",
    "dense_eigen",
    "linear_solve",
    "lyapunov_solve",
    "propagate_linear",
    "integrate_lyapunov",
]

_choice = os.environ.get("KERRMECH_NUMERICS", "").strip().lower()
if _choice not in ("", "pure", "compiled"):
    raise ValueError(
        f"KERRMECH_NUMERICS must be 'pure' or 'compiled', got {_choice!r}"
    )

_KERNELS = ("poly_roots", "dense_eigen", "linear_solve", "lyapunov_solve",
            "propagate_linear", "integrate_lyapunov")

_impl = None
if _choice in ("", "compiled"):
    try:
        from . import _kernels_cy as _impl
        for _name in _KERNELS:
            getattr(_impl, _name)
    except (ImportError, AttributeError):
        if _choice == "compiled":
            raise
        _impl = None
if _impl is None:
    from . import _kernels_py as _impl

#: Name of the active backend, ``"compiled"`` or ``"pure"``.
BACKEND: str = _impl.BACKEND

poly_roots = _impl.poly_roots
dense_eigen = _impl.dense_eigen
linear_solve = _impl.linear_solve
lyapunov_solve = _impl.lyapunov_solve
propagate_linear = _impl.propagate_linear
integrate_lyapunov = _impl.integrate_lyapunov


@dataclass(frozen=True)
class ToleranceSet:
    """Default tolerances used by the consuming modules.

    All values are dimensionless (relative unless named ``_abs``) and must
    lie in (0, 1e-2).
    """

    root_polish_rel: float = 1e-10
    eig_rel: float = 1e-9
    lyap_residual_rel: float = 1e-8
    ode_rel: float = 1e-6
    ode_abs: float = 1e-12

    def __post_init__(self):
        for name, value in self.__dict__.items():
            if not 0.0 < value < 1e-2:
                raise ValueError(f"tolerance {name}={value} outside (0, 1e-2)")


DEFAULT_TOLERANCES = ToleranceSet()

"""Backend selection for the hot kernels.

The compiled extension ``rftopo._core`` is used when it imports; otherwise
the numpy fallback is used. Set ``RFTOPO_PURE_PYTHON=1`` to force the
fallback.
"""
import os

from . import _fallback

BACKEND = "python"
_impl = _fallback

if os.environ.get("RFTOPO_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _core as _impl  # noqa: F811
        BACKEND = "compiled"
    except ImportError:
        _impl = _fallback

dumbbell_rhs = _impl.dumbbell_rhs
sphere_rhs = _impl.sphere_rhs
rk4_dumbbell = _impl.rk4_dumbbell
rk4_sphere = _impl.rk4_sphere
reduce_boundary = _impl.reduce_boundary


def get_backend(name):
    """Return the kernel module for ``"compiled"`` or ``"python"``.

    ``None`` means whichever backend was selected at import.
    """
    if name is None:
        return _impl
    if name == "python":
        return _fallback
    if name == "compiled":
        from . import _core
        return _core
    raise ValueError(f"unknown backend {name!r}")

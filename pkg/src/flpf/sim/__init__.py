"""Discrete-time scheduling simulator.

The slot loop has two interchangeable backends: a compiled Cython kernel and
a pure-Python reference. The compiled one is used when importable unless
FLPF_PURE_PY=1 forces the fallback; both produce bit-identical traces.
"""

import os

try:
    from . import _kernel  # type: ignore[attr-defined]

    _kernel_available = True
except ImportError:
    _kernel_available = False

if _kernel_available and os.environ.get("FLPF_PURE_PY", "0") in ("", "0"):
    from . import _kernel as backend
else:
    from . import _pykernel as backend


def kernel_backend() -> str:
    """Name of the active slot-loop backend: 'compiled' or 'python'."""
    return backend.BACKEND


from .engine import (  # noqa: E402
    MIN_VERDICT_SLOTS,
    SimTrace,
    SimVerdict,
    run_iid,
    run_scripted,
    stability_verdict,
)
from .gms import QueueState, Schedule, gms_schedule, step  # noqa: E402
from .patterns import ScriptedPattern, build_adversarial_pattern  # noqa: E402

__all__ = [
    "MIN_VERDICT_SLOTS",
    "QueueState",
    "Schedule",
    "ScriptedPattern",
    "SimTrace",
    "SimVerdict",
    "backend",
    "build_adversarial_pattern",
    "gms_schedule",
    "kernel_backend",
    "run_iid",
    "run_scripted",
    "stability_verdict",
    "step",
]

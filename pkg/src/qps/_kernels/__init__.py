"""Hot-loop kernels: one gate-array step and the batched correction loop.

A compiled Cython implementation is preferred; a pure numpy fallback with
the same call signatures is selected when the extension is unavailable or
when ``QPS_PURE_PYTHON`` is set in the environment.  Within one backend the
results are bit-reproducible; across backends they agree statistically but
may differ in the last float ulp (summation order), so cross-backend tests
compare distributions, not bits.
"""

import os

if os.environ.get("QPS_PURE_PYTHON"):
    from . import _fallback as impl

    BACKEND = "python"
else:
    try:
        from . import _core as impl  # type: ignore[attr-defined]

        BACKEND = "native"
    except ImportError:
        from . import _fallback as impl

        BACKEND = "python"

step_diag = impl.step_diag
step_dense = impl.step_dense
correction_attempts_diag = impl.correction_attempts_diag
correction_attempts_dense = impl.correction_attempts_dense

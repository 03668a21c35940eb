"""Pure numpy implementation of the three-level stencil update.

This is the fallback backend used when the compiled extension is not
available. The arithmetic is written to match the compiled kernel operation
for operation, so the two backends produce bit-identical fields.
"""

import numpy as np


def advance_steps(u_prev, u_curr, lam2, left=None, right=None):
    """Advance the recurrence len(lam2) steps.

    lam2[s] is the squared Courant factor (a(t) dt / h)^2 frozen at the time
    level consumed by step s. ``left`` and ``right`` optionally prescribe the
    boundary values of each new level (default zero). The input arrays are
    consumed as scratch; the returned pair is the final (previous, current).
    """
    a = u_prev
    b = u_curr
    c = np.empty_like(b)
    for s in range(len(lam2)):
        lam = lam2[s]
        c[1:-1] = 2.0 * b[1:-1] - a[1:-1] + lam * (b[2:] - 2.0 * b[1:-1] + b[:-2])
        c[0] = 0.0 if left is None else left[s]
        c[-1] = 0.0 if right is None else right[s]
        a, b, c = b, c, a
    return a, b

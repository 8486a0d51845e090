"""Compiled inner loops.

Every kernel is a single serial pass so results are bit-reproducible for a
given input. ``fastmath`` must stay off: it would let LLVM reassociate the
compensation terms away.
"""

import numba
import numpy as np


@numba.njit(cache=True, nogil=True)
def neumaier_sum(a):
    """Compensated sum of a 1-D float64 array (Neumaier's variant of Kahan)."""
    s = 0.0
    c = 0.0
    for i in range(a.shape[0]):
        x = a[i]
        t = s + x
        if abs(s) >= abs(x):
            c += (s - t) + x
        else:
            c += (x - t) + s
        s = t
    return s + c


@numba.njit(cache=True, nogil=True)
def clipped_sum_and_count(y, gamma):
    """Return (sum_i min(1, [y_i - gamma]_+), #{i : 0 < y_i - gamma < 1}).

    Entries saturated at 1 are tallied as an exact integer and added once at
    the end; only the fractional entries go through the compensated sum.
    """
    ones = 0
    count = 0
    s = 0.0
    c = 0.0
    for i in range(y.shape[0]):
        v = y[i] - gamma
        if v >= 1.0:
            ones += 1
        elif v > 0.0:
            count += 1
            t = s + v
            if s >= v:
                c += (s - t) + v
            else:
                c += (v - t) + s
            s = t
    # ones is exact in float64 for n < 2**53
    f = float(ones)
    t = f + s
    if f >= s:
        c += (f - t) + s
    else:
        c += (s - t) + f
    return t + c, count


def compensated_sum(a) -> float:
    a = np.ascontiguousarray(a, dtype=np.float64)
    if a.ndim != 1:
        a = a.ravel()
    return float(neumaier_sum(a))

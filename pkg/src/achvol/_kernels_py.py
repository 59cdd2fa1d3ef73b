"""Pure-python (numpy) implementations of the hot series kernels.

These are the fallback twins of the compiled routines in ``_kernels.pyx``;
both backends must produce identical results.  Only the truncated Cauchy
product is hot (it dominates curvature assembly); the series inverse and
square root recurrences are shared utility code used by both backends.
"""

import numpy as np

BACKEND_NAME = "python"


def conv_trunc(a, b, nout):
    """First ``nout`` coefficients of the Cauchy product of ``a`` and ``b``."""
    if nout <= 0:
        return np.zeros(0, dtype=np.complex128)
    full = np.convolve(a[:nout], b[:nout])
    if full.shape[0] >= nout:
        return np.ascontiguousarray(full[:nout])
    out = np.zeros(nout, dtype=np.complex128)
    out[: full.shape[0]] = full
    return out


def series_inv(a, nout):
    """Reciprocal power series of ``a`` (a[0] != 0), ``nout`` coefficients."""
    out = np.zeros(nout, dtype=np.complex128)
    lead = a[0]
    out[0] = 1.0 / lead
    la = a.shape[0]
    for k in range(1, nout):
        acc = 0.0 + 0.0j
        jmax = min(k, la - 1)
        for j in range(1, jmax + 1):
            acc += a[j] * out[k - j]
        out[k] = -acc / lead
    return out


def series_sqrt(a, nout):
    """Power-series square root of ``a`` with positive leading coefficient."""
    out = np.zeros(nout, dtype=np.complex128)
    lead = np.sqrt(a[0])
    out[0] = lead
    la = a.shape[0]
    for k in range(1, nout):
        acc = a[k] if k < la else 0.0 + 0.0j
        for j in range(1, k):
            acc -= out[j] * out[k - j]
        out[k] = acc / (2.0 * lead)
    return out

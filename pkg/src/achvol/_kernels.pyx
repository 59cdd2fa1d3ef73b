# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled twin of ``_kernels_py``: truncated Cauchy product.

The jet multiply below is the innermost loop of every curvature
evaluation, so it is kept free of temporaries and python-level calls.
"""

import numpy as np

cimport numpy as cnp

BACKEND_NAME = "compiled"


def conv_trunc(cnp.complex128_t[::1] a, cnp.complex128_t[::1] b, Py_ssize_t nout):
    """First ``nout`` coefficients of the Cauchy product of ``a`` and ``b``."""
    if nout <= 0:
        return np.zeros(0, dtype=np.complex128)
    out_arr = np.zeros(nout, dtype=np.complex128)
    cdef cnp.complex128_t[::1] out = out_arr
    cdef Py_ssize_t la = a.shape[0]
    cdef Py_ssize_t lb = b.shape[0]
    cdef Py_ssize_t i, j, jmax
    cdef cnp.complex128_t ai
    if la > nout:
        la = nout
    for i in range(la):
        ai = a[i]
        if ai.real == 0.0 and ai.imag == 0.0:
            continue
        jmax = nout - i
        if jmax > lb:
            jmax = lb
        for j in range(jmax):
            out[i + j] = out[i + j] + ai * b[j]
    return out_arr

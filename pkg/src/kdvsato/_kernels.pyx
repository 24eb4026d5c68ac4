# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: dense operator assembly and batched Cauchy sums.

Must produce the same values as ``_kernels_py`` (the numpy reference) up to
rounding; the test suite compares both backends directly.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def assemble_operator(cnp.complex128_t[:, ::1] K,
                      cnp.intp_t[::1] neg,
                      cnp.complex128_t[::1] d1,
                      cnp.complex128_t[::1] d2,
                      cnp.complex128_t[::1] gf1,
                      cnp.complex128_t[::1] gf2):
    """See ``kdvsato._kernels_py.assemble_operator``."""
    cdef Py_ssize_t m = K.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] out_arr = np.empty((m, m), dtype=np.complex128)
    cdef cnp.complex128_t[:, ::1] out = out_arr
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] cp_arr = np.empty(m, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] cm_arr = np.empty(m, dtype=np.complex128)
    cdef cnp.complex128_t[::1] cplus = cp_arr
    cdef cnp.complex128_t[::1] cmneg = cm_arr
    cdef Py_ssize_t i, j, nj
    for j in range(m):
        cplus[j] = 0.5 * (d1[j] + d2[j])
    # store cminus pre-permuted so the inner loop is a contiguous read
    for j in range(m):
        nj = neg[j]
        cmneg[j] = 0.5 * (d1[nj] - d2[nj])
    for i in range(m):
        for j in range(m):
            out[i, j] = K[i, j] * cplus[j] + K[i, neg[j]] * cmneg[j]
    for i in range(m):
        out[i, i] = out[i, i] + 0.5 * (gf1[i] + gf2[i])
        out[i, neg[i]] = out[i, neg[i]] + 0.5 * (gf1[i] - gf2[i])
    return out_arr


def cauchy_targets(cnp.complex128_t[::1] nodes,
                   cnp.complex128_t[::1] wf,
                   cnp.complex128_t[::1] targets):
    """See ``kdvsato._kernels_py.cauchy_targets``."""
    cdef Py_ssize_t m = nodes.shape[0]
    cdef Py_ssize_t k = targets.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out_arr = np.empty(k, dtype=np.complex128)
    cdef cnp.complex128_t[::1] out = out_arr
    cdef cnp.complex128_t acc, z
    cdef cnp.complex128_t two_pi_i = 2j * np.pi
    cdef Py_ssize_t i, j
    for i in range(k):
        z = targets[i]
        acc = 0
        for j in range(m):
            acc = acc + wf[j] / (nodes[j] - z)
        out[i] = acc / two_pi_i
    return out_arr

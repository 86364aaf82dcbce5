# cython: boundscheck=False, wraparound=False, cdivision=True
"""Typed-loop implementations of the decoder's hot kernels.

Same contracts as the numpy backend; see _numpy.py for shape notation.
"""

import numpy as np

NAME = "cython"


def temporal_forward(double[:, :, ::1] x, double[:, ::1] w, double[::1] b):
    cdef Py_ssize_t B = x.shape[0], C = x.shape[1], T = x.shape[2]
    cdef Py_ssize_t K = w.shape[0], W = w.shape[1]
    cdef Py_ssize_t L = T - W + 1
    out_arr = np.empty((B, K, C, L), dtype=np.float64)
    cdef double[:, :, :, ::1] out = out_arr
    cdef Py_ssize_t bi, k, c, l, u
    cdef double acc
    with nogil:
        for bi in range(B):
            for k in range(K):
                for c in range(C):
                    for l in range(L):
                        acc = b[k]
                        for u in range(W):
                            acc += x[bi, c, l + u] * w[k, u]
                        out[bi, k, c, l] = acc
    return out_arr


def temporal_backward_input(double[:, :, :, ::1] g, double[:, ::1] w):
    cdef Py_ssize_t B = g.shape[0], K = g.shape[1], C = g.shape[2], L = g.shape[3]
    cdef Py_ssize_t W = w.shape[1]
    cdef Py_ssize_t T = L + W - 1
    dx_arr = np.zeros((B, C, T), dtype=np.float64)
    cdef double[:, :, ::1] dx = dx_arr
    cdef Py_ssize_t bi, k, c, l, u
    cdef double gv
    with nogil:
        for bi in range(B):
            for k in range(K):
                for c in range(C):
                    for l in range(L):
                        gv = g[bi, k, c, l]
                        for u in range(W):
                            dx[bi, c, l + u] += gv * w[k, u]
    return dx_arr


def temporal_backward_params(double[:, :, :, ::1] g, double[:, :, ::1] x, Py_ssize_t width):
    cdef Py_ssize_t B = g.shape[0], K = g.shape[1], C = g.shape[2], L = g.shape[3]
    gw_arr = np.zeros((K, width), dtype=np.float64)
    gb_arr = np.zeros(K, dtype=np.float64)
    cdef double[:, ::1] gw = gw_arr
    cdef double[::1] gb = gb_arr
    cdef Py_ssize_t bi, k, c, l, u
    cdef double gv
    with nogil:
        for bi in range(B):
            for k in range(K):
                for c in range(C):
                    for l in range(L):
                        gv = g[bi, k, c, l]
                        gb[k] += gv
                        for u in range(width):
                            gw[k, u] += gv * x[bi, c, l + u]
    return gw_arr, gb_arr


def spatial_forward(double[:, :, :, ::1] a, double[:, :, ::1] w, double[::1] b):
    cdef Py_ssize_t B = a.shape[0], K = a.shape[1], C = a.shape[2], L = a.shape[3]
    cdef Py_ssize_t S = w.shape[0]
    out_arr = np.empty((B, S, L), dtype=np.float64)
    cdef double[:, :, ::1] out = out_arr
    cdef Py_ssize_t bi, s, k, c, l
    cdef double wv
    with nogil:
        for bi in range(B):
            for s in range(S):
                for l in range(L):
                    out[bi, s, l] = b[s]
                for k in range(K):
                    for c in range(C):
                        wv = w[s, k, c]
                        for l in range(L):
                            out[bi, s, l] += wv * a[bi, k, c, l]
    return out_arr


def spatial_backward_input(double[:, :, ::1] g, double[:, :, ::1] w):
    cdef Py_ssize_t B = g.shape[0], S = g.shape[1], L = g.shape[2]
    cdef Py_ssize_t K = w.shape[1], C = w.shape[2]
    da_arr = np.zeros((B, K, C, L), dtype=np.float64)
    cdef double[:, :, :, ::1] da = da_arr
    cdef Py_ssize_t bi, s, k, c, l
    cdef double wv
    with nogil:
        for bi in range(B):
            for s in range(S):
                for k in range(K):
                    for c in range(C):
                        wv = w[s, k, c]
                        for l in range(L):
                            da[bi, k, c, l] += wv * g[bi, s, l]
    return da_arr


def spatial_backward_params(double[:, :, ::1] g, double[:, :, :, ::1] a):
    cdef Py_ssize_t B = g.shape[0], S = g.shape[1], L = g.shape[2]
    cdef Py_ssize_t K = a.shape[1], C = a.shape[2]
    gw_arr = np.zeros((S, K, C), dtype=np.float64)
    gb_arr = np.zeros(S, dtype=np.float64)
    cdef double[:, :, ::1] gw = gw_arr
    cdef double[::1] gb = gb_arr
    cdef Py_ssize_t bi, s, k, c, l
    cdef double acc
    with nogil:
        for bi in range(B):
            for s in range(S):
                for l in range(L):
                    gb[s] += g[bi, s, l]
                for k in range(K):
                    for c in range(C):
                        acc = 0.0
                        for l in range(L):
                            acc += g[bi, s, l] * a[bi, k, c, l]
                        gw[s, k, c] += acc
    return gw_arr, gb_arr


def avgpool_forward(double[:, :, ::1] a, Py_ssize_t width):
    cdef Py_ssize_t B = a.shape[0], S = a.shape[1], L = a.shape[2]
    cdef Py_ssize_t Q = L // width
    out_arr = np.empty((B, S, Q), dtype=np.float64)
    cdef double[:, :, ::1] out = out_arr
    cdef Py_ssize_t bi, s, q, u
    cdef double acc
    with nogil:
        for bi in range(B):
            for s in range(S):
                for q in range(Q):
                    acc = 0.0
                    for u in range(width):
                        acc += a[bi, s, q * width + u]
                    out[bi, s, q] = acc / width
    return out_arr


def avgpool_backward(double[:, :, ::1] g, Py_ssize_t width, Py_ssize_t out_len):
    cdef Py_ssize_t B = g.shape[0], S = g.shape[1], Q = g.shape[2]
    da_arr = np.zeros((B, S, out_len), dtype=np.float64)
    cdef double[:, :, ::1] da = da_arr
    cdef Py_ssize_t bi, s, q, u
    cdef double gv
    with nogil:
        for bi in range(B):
            for s in range(S):
                for q in range(Q):
                    gv = g[bi, s, q] / width
                    for u in range(width):
                        da[bi, s, q * width + u] = gv
    return da_arr

# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled SGD inner loops; kernels_py implements the identical contracts."""

import numpy as np

from libc.math cimport exp


def hinge_epoch(
    const double[::1] data,
    const int[::1] indices,
    const int[::1] indptr,
    const double[:, ::1] y_signs,
    const long long[::1] order,
    double[:, ::1] v,
    double[:, ::1] acc,
    double[::1] bias,
    double[::1] bias_acc,
    double scale,
    double scale_sum,
    long long step,
    double eta0,
    double l2,
    long long total_steps,
):
    cdef Py_ssize_t n_classes = v.shape[0]
    cdef Py_ssize_t n_docs = order.shape[0]
    cdef Py_ssize_t oi, c, jj, i, lo, hi
    cdef double eta, y, m, coef, d
    cdef double[::1] margins = np.empty(n_classes, dtype=np.float64)

    for oi in range(n_docs):
        i = order[oi]
        lo = indptr[i]
        hi = indptr[i + 1]
        for c in range(n_classes):
            m = 0.0
            for jj in range(lo, hi):
                m += v[c, indices[jj]] * data[jj]
            margins[c] = scale * m + bias[c]
        step += 1
        eta = eta0 * (total_steps - step + 1) / total_steps
        scale *= 1.0 - eta * l2
        for c in range(n_classes):
            y = y_signs[c, i]
            if y * margins[c] < 1.0:
                coef = eta * y / scale
                for jj in range(lo, hi):
                    d = coef * data[jj]
                    v[c, indices[jj]] += d
                    acc[c, indices[jj]] += scale_sum * d
                bias[c] += eta * y
        for c in range(n_classes):
            bias_acc[c] += bias[c]
        scale_sum += scale
    return scale, scale_sum, step


def emb_epoch(
    const double[::1] data,
    const int[::1] indices,
    const int[::1] indptr,
    const long long[::1] labels,
    const long long[::1] order,
    double[:, ::1] emb,
    double[:, ::1] out_w,
    double[::1] out_b,
    long long step,
    double eta0,
    double l2,
    long long total_steps,
):
    cdef Py_ssize_t n_classes = out_w.shape[0]
    cdef Py_ssize_t dim = out_w.shape[1]
    cdef Py_ssize_t n_docs = order.shape[0]
    cdef Py_ssize_t oi, c, jj, k, i, lo, hi
    cdef double eta, total, zmax, zsum, g, decay, coef
    cdef double[::1] h = np.empty(dim, dtype=np.float64)
    cdef double[::1] gz = np.empty(n_classes, dtype=np.float64)
    cdef double[::1] grad_h = np.empty(dim, dtype=np.float64)

    for oi in range(n_docs):
        i = order[oi]
        lo = indptr[i]
        hi = indptr[i + 1]
        step += 1
        eta = eta0 * (total_steps - step + 1) / total_steps

        total = 0.0
        for k in range(dim):
            h[k] = 0.0
        for jj in range(lo, hi):
            total += data[jj]
            for k in range(dim):
                h[k] += data[jj] * emb[indices[jj], k]
        if total > 0.0:
            for k in range(dim):
                h[k] /= total

        zmax = -1e300
        for c in range(n_classes):
            g = out_b[c]
            for k in range(dim):
                g += out_w[c, k] * h[k]
            gz[c] = g
            if g > zmax:
                zmax = g
        zsum = 0.0
        for c in range(n_classes):
            gz[c] = exp(gz[c] - zmax)
            zsum += gz[c]
        for c in range(n_classes):
            gz[c] /= zsum
        gz[labels[i]] -= 1.0

        for k in range(dim):
            g = 0.0
            for c in range(n_classes):
                g += out_w[c, k] * gz[c]
            grad_h[k] = g

        decay = 1.0 - eta * l2
        for c in range(n_classes):
            for k in range(dim):
                out_w[c, k] = out_w[c, k] * decay - eta * gz[c] * h[k]
            out_b[c] -= eta * gz[c]

        if total > 0.0:
            coef = eta / total
            for jj in range(lo, hi):
                for k in range(dim):
                    emb[indices[jj], k] -= coef * data[jj] * grad_h[k]
    return step

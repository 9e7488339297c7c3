# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled fitness kernels. Mirrors ``dpdp._kernels_py`` call for call."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()


cdef inline bint _hits(double ax, double ay, double bx, double by,
                       double xmin, double ymin, double xmax, double ymax) nogil:
    cdef double dx = bx - ax
    cdef double dy = by - ay
    cdef double t0 = 0.0
    cdef double t1 = 1.0
    cdef double p[4]
    cdef double q[4]
    cdef double r
    cdef int k
    p[0] = -dx; q[0] = ax - xmin
    p[1] = dx;  q[1] = xmax - ax
    p[2] = -dy; q[2] = ay - ymin
    p[3] = dy;  q[3] = ymax - ay
    for k in range(4):
        if p[k] == 0.0:
            if q[k] < 0.0:
                return False
            continue
        r = q[k] / p[k]
        if p[k] < 0.0:
            if r > t1:
                return False
            if r > t0:
                t0 = r
        else:
            if r < t0:
                return False
            if r < t1:
                t1 = r
    return True


def segment_hits_rect(double ax, double ay, double bx, double by,
                      double xmin, double ymin, double xmax, double ymax):
    return bool(_hits(ax, ay, bx, by, xmin, ymin, xmax, ymax))


def count_segment_hits(double ax, double ay, double bx, double by, rects):
    cdef double[:, ::1] r = np.ascontiguousarray(rects, dtype=np.float64).reshape(-1, 4)
    cdef Py_ssize_t k
    cdef long n = 0
    for k in range(r.shape[0]):
        if _hits(ax, ay, bx, by, r[k, 0], r[k, 1], r[k, 2], r[k, 3]):
            n += 1
    return n


def leg_matrices(points, rects):
    cdef double[:, ::1] p = np.ascontiguousarray(points, dtype=np.float64).reshape(-1, 2)
    cdef double[:, ::1] r = np.ascontiguousarray(rects, dtype=np.float64).reshape(-1, 4)
    cdef Py_ssize_t n = p.shape[0]
    dist_arr = np.zeros((n, n), dtype=np.float64)
    hits_arr = np.zeros((n, n), dtype=np.int64)
    cdef double[:, ::1] dist = dist_arr
    cdef long long[:, ::1] hits = hits_arr
    cdef Py_ssize_t i, j, k
    cdef double d, dx, dy
    cdef long long c
    with nogil:
        for i in range(n):
            for j in range(i + 1, n):
                # plain sqrt, not hypot: bit-identical to the Python twin
                dx = p[j, 0] - p[i, 0]
                dy = p[j, 1] - p[i, 1]
                d = sqrt(dx * dx + dy * dy)
                c = 0
                for k in range(r.shape[0]):
                    if _hits(p[i, 0], p[i, 1], p[j, 0], p[j, 1], r[k, 0], r[k, 1], r[k, 2], r[k, 3]):
                        c += 1
                dist[i, j] = d
                dist[j, i] = d
                hits[i, j] = c
                hits[j, i] = c
    return dist_arr, hits_arr


def population_sums(dist_in, hits_in, orders_in, Py_ssize_t origin):
    cdef double[:, ::1] dist = np.ascontiguousarray(dist_in, dtype=np.float64)
    cdef long long[:, ::1] hits = np.ascontiguousarray(hits_in, dtype=np.int64)
    cdef long long[:, ::1] orders = np.ascontiguousarray(orders_in, dtype=np.int64)
    cdef Py_ssize_t m = orders.shape[0]
    cdef Py_ssize_t L = orders.shape[1]
    dsum_arr = np.zeros(m, dtype=np.float64)
    hsum_arr = np.zeros(m, dtype=np.int64)
    cdef double[::1] dsum = dsum_arr
    cdef long long[::1] hsum = hsum_arr
    cdef Py_ssize_t k, s, prev, idx
    cdef double total
    cdef long long count
    with nogil:
        for k in range(m):
            prev = origin
            total = 0.0
            count = 0
            for s in range(L):
                idx = orders[k, s]
                total = total + dist[prev, idx]
                count = count + hits[prev, idx]
                prev = idx
            dsum[k] = total
            hsum[k] = count
    return dsum_arr, hsum_arr

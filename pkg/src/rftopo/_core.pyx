# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled kernels: method-of-lines right-hand sides, RK4 stepping and
GF(2) column reduction.

Every floating-point expression mirrors ``_fallback.py`` operation for
operation; the extension is built with ``-ffp-contract=off`` so the two
backends agree bit for bit.
"""
import numpy as np
cimport numpy as cnp
from libcpp.vector cimport vector

cnp.import_array()


cdef void _dumbbell_rhs(const double[::1] psi, const double[::1] phi, double h,
                        bint dirichlet, double[::1] dpsi, double[::1] dphi,
                        double[::1] K, double[::1] L) noexcept nogil:
    cdef Py_ssize_t n = psi.shape[0]
    cdef Py_ssize_t i
    cdef double two_h = 2.0 * h
    cdef double hh = h * h
    cdef double pm, pp, px, pxx, fx, f, ps, pss
    for i in range(n):
        if i == 0:
            pm = psi[1] - 2.0 * h * phi[0]
            pp = psi[1]
            fx = (-3.0 * phi[0] + 4.0 * phi[1] - phi[2]) / two_h
        elif i == n - 1:
            pm = psi[n - 2]
            pp = psi[n - 2] - 2.0 * h * phi[n - 1]
            fx = (3.0 * phi[n - 1] - 4.0 * phi[n - 2] + phi[n - 3]) / two_h
        else:
            pm = psi[i - 1]
            pp = psi[i + 1]
            fx = (phi[i + 1] - phi[i - 1]) / two_h
        px = (pp - pm) / two_h
        pxx = ((pp + pm) - 2.0 * psi[i]) / hh
        f = phi[i]
        ps = px / f
        pss = (pxx / f - fx * px / (f * f)) / f
        K[i] = -pss / psi[i]
        L[i] = (1.0 - ps * ps) / (psi[i] * psi[i])
        dpsi[i] = -(K[i] + L[i]) * psi[i]
        dphi[i] = -2.0 * K[i] * phi[i]
    if dirichlet:
        dphi[0] = 1.0
        dphi[n - 1] = 1.0


cdef void _sphere_rhs(const double[::1] w, const double[::1] u, const double[::1] cot,
                      double h, double[::1] dw, double[::1] R) noexcept nogil:
    cdef Py_ssize_t n = w.shape[0]
    cdef Py_ssize_t i
    cdef double two_h = 2.0 * h
    cdef double hh = h * h
    cdef double lap, ux, uxx
    for i in range(n):
        if i == 0:
            lap = 2.0 * ((u[1] - 2.0 * u[0] + u[1]) / hh)
        elif i == n - 1:
            lap = 2.0 * ((u[n - 2] - 2.0 * u[n - 1] + u[n - 2]) / hh)
        else:
            ux = (u[i + 1] - u[i - 1]) / two_h
            uxx = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / hh
            lap = uxx + cot[i] * ux
        R[i] = 2.0 * (1.0 - lap) / w[i]
        dw[i] = -2.0 * (1.0 - lap)


def dumbbell_rhs(const double[::1] psi, const double[::1] phi, double h, bint dirichlet):
    cdef Py_ssize_t n = psi.shape[0]
    dpsi = np.empty(n)
    dphi = np.empty(n)
    K = np.empty(n)
    L = np.empty(n)
    _dumbbell_rhs(psi, phi, h, dirichlet, dpsi, dphi, K, L)
    return dpsi, dphi, K, L


def sphere_rhs(const double[::1] w, const double[::1] cot, double h):
    cdef Py_ssize_t n = w.shape[0]
    u = 0.5 * np.log(np.asarray(w))
    dw = np.empty(n)
    R = np.empty(n)
    _sphere_rhs(w, u, cot, h, dw, R)
    return dw, R


def rk4_dumbbell(const double[::1] psi, const double[::1] phi, double h, double dt,
                 bint dirichlet, const double[::1] k1psi, const double[::1] k1phi):
    cdef Py_ssize_t n = psi.shape[0]
    cdef Py_ssize_t i
    cdef double half = 0.5 * dt
    cdef double sixth = dt / 6.0
    cdef double[::1] ypsi = np.empty(n)
    cdef double[::1] yphi = np.empty(n)
    cdef double[::1] k2psi = np.empty(n)
    cdef double[::1] k2phi = np.empty(n)
    cdef double[::1] k3psi = np.empty(n)
    cdef double[::1] k3phi = np.empty(n)
    cdef double[::1] k4psi = np.empty(n)
    cdef double[::1] k4phi = np.empty(n)
    cdef double[::1] K = np.empty(n)
    cdef double[::1] L = np.empty(n)
    out_psi = np.empty(n)
    out_phi = np.empty(n)
    cdef double[::1] opsi = out_psi
    cdef double[::1] ophi = out_phi
    with nogil:
        for i in range(n):
            ypsi[i] = psi[i] + half * k1psi[i]
            yphi[i] = phi[i] + half * k1phi[i]
        _dumbbell_rhs(ypsi, yphi, h, dirichlet, k2psi, k2phi, K, L)
        for i in range(n):
            ypsi[i] = psi[i] + half * k2psi[i]
            yphi[i] = phi[i] + half * k2phi[i]
        _dumbbell_rhs(ypsi, yphi, h, dirichlet, k3psi, k3phi, K, L)
        for i in range(n):
            ypsi[i] = psi[i] + dt * k3psi[i]
            yphi[i] = phi[i] + dt * k3phi[i]
        _dumbbell_rhs(ypsi, yphi, h, dirichlet, k4psi, k4phi, K, L)
        for i in range(n):
            opsi[i] = psi[i] + sixth * (k1psi[i] + 2.0 * k2psi[i] + 2.0 * k3psi[i] + k4psi[i])
            ophi[i] = phi[i] + sixth * (k1phi[i] + 2.0 * k2phi[i] + 2.0 * k3phi[i] + k4phi[i])
    return out_psi, out_phi


def rk4_sphere(const double[::1] w, const double[::1] cot, double h, double dt,
               const double[::1] k1):
    cdef Py_ssize_t n = w.shape[0]
    cdef Py_ssize_t i
    cdef double half = 0.5 * dt
    cdef double sixth = dt / 6.0
    ys = np.empty(n)
    cdef double[::1] y = ys
    cdef double[::1] k2 = np.empty(n)
    cdef double[::1] k3 = np.empty(n)
    cdef double[::1] k4 = np.empty(n)
    cdef double[::1] R = np.empty(n)
    cdef double[::1] u
    out = np.empty(n)
    cdef double[::1] o = out
    for i in range(n):
        y[i] = w[i] + half * k1[i]
    u = 0.5 * np.log(ys)
    _sphere_rhs(y, u, cot, h, k2, R)
    for i in range(n):
        y[i] = w[i] + half * k2[i]
    u = 0.5 * np.log(ys)
    _sphere_rhs(y, u, cot, h, k3, R)
    for i in range(n):
        y[i] = w[i] + dt * k3[i]
    u = 0.5 * np.log(ys)
    _sphere_rhs(y, u, cot, h, k4, R)
    for i in range(n):
        o[i] = w[i] + sixth * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
    return out


cdef void _xor_into(vector[Py_ssize_t]& col, const vector[Py_ssize_t]& other,
                    vector[Py_ssize_t]& scratch) noexcept nogil:
    # symmetric difference of two ascending index lists
    cdef size_t a = 0, b = 0
    cdef size_t na = col.size(), nb = other.size()
    scratch.clear()
    while a < na and b < nb:
        if col[a] < other[b]:
            scratch.push_back(col[a])
            a += 1
        elif col[a] > other[b]:
            scratch.push_back(other[b])
            b += 1
        else:
            a += 1
            b += 1
    while a < na:
        scratch.push_back(col[a])
        a += 1
    while b < nb:
        scratch.push_back(other[b])
        b += 1
    col.swap(scratch)


def reduce_boundary(const cnp.int64_t[::1] indptr, const cnp.int64_t[::1] indices,
                    const cnp.int64_t[::1] dims, bint clearing):
    """Reduce the filtered boundary matrix over GF(2).

    Returns ``low`` where ``low[j]`` is the pivot row of reduced column ``j``
    (``-1`` for a zero column).
    """
    cdef Py_ssize_t m = dims.shape[0]
    cdef Py_ssize_t j, k, piv, d, top = 0
    cdef vector[vector[Py_ssize_t]] cols
    cdef vector[Py_ssize_t] scratch
    cdef vector[Py_ssize_t] owner
    cdef vector[char] cleared
    low_arr = np.full(m, -1, dtype=np.int64)
    cdef cnp.int64_t[::1] low = low_arr
    cols.resize(m)
    owner.assign(m, -1)
    cleared.assign(m, 0)
    for j in range(m):
        if dims[j] > top:
            top = dims[j]
    with nogil:
        if clearing:
            d = top
            while d >= 1:
                for j in range(m):
                    if dims[j] != d or cleared[j]:
                        continue
                    _reduce_column(j, indptr, indices, cols, owner, scratch)
                    if cols[j].size() > 0:
                        piv = cols[j].back()
                        owner[piv] = j
                        low[j] = piv
                        cleared[piv] = 1
                        cols[piv].clear()
                d -= 1
        else:
            for j in range(m):
                _reduce_column(j, indptr, indices, cols, owner, scratch)
                if cols[j].size() > 0:
                    piv = cols[j].back()
                    owner[piv] = j
                    low[j] = piv
    return low_arr


cdef void _reduce_column(Py_ssize_t j, const cnp.int64_t[::1] indptr,
                         const cnp.int64_t[::1] indices,
                         vector[vector[Py_ssize_t]]& cols, vector[Py_ssize_t]& owner,
                         vector[Py_ssize_t]& scratch) noexcept nogil:
    cdef Py_ssize_t k, piv
    cols[j].clear()
    for k in range(indptr[j], indptr[j + 1]):
        cols[j].push_back(indices[k])
    while cols[j].size() > 0:
        piv = cols[j].back()
        if owner[piv] < 0:
            break
        _xor_into(cols[j], cols[owner[piv]], scratch)

"""Pure-Python/numpy versions of the compiled kernels in ``_core.pyx``.

The arithmetic is written in the same order as the C loops so that both
backends return identical arrays.
"""
import numpy as np


def dumbbell_rhs(psi, phi, h, dirichlet):
    psi = np.asarray(psi, dtype=float)
    phi = np.asarray(phi, dtype=float)
    n = psi.shape[0]
    two_h = 2.0 * h
    hh = h * h
    pm = np.empty(n)
    pp = np.empty(n)
    pm[1:] = psi[:-1]
    pp[:-1] = psi[1:]
    # ghost values carry the pole slopes psi_x = +phi (left), -phi (right)
    pm[0] = psi[1] - 2.0 * h * phi[0]
    pp[0] = psi[1]
    pm[-1] = psi[-2]
    pp[-1] = psi[-2] - 2.0 * h * phi[-1]
    fx = np.empty(n)
    fx[1:-1] = (phi[2:] - phi[:-2]) / two_h
    fx[0] = (-3.0 * phi[0] + 4.0 * phi[1] - phi[2]) / two_h
    fx[-1] = (3.0 * phi[-1] - 4.0 * phi[-2] + phi[-3]) / two_h
    px = (pp - pm) / two_h
    pxx = ((pp + pm) - 2.0 * psi) / hh
    ps = px / phi
    pss = (pxx / phi - fx * px / (phi * phi)) / phi
    K = -pss / psi
    L = (1.0 - ps * ps) / (psi * psi)
    dpsi = -(K + L) * psi
    dphi = -2.0 * K * phi
    if dirichlet:
        dphi[0] = 1.0
        dphi[-1] = 1.0
    return dpsi, dphi, K, L


def _sphere_rhs(w, u, cot, h):
    n = w.shape[0]
    two_h = 2.0 * h
    hh = h * h
    lap = np.empty(n)
    ux = (u[2:] - u[:-2]) / two_h
    uxx = (u[2:] - 2.0 * u[1:-1] + u[:-2]) / hh
    lap[1:-1] = uxx + cot[1:-1] * ux
    # Neumann ghost at the cut poles; cot(theta) u_theta -> u_theta_theta there
    lap[0] = 2.0 * ((u[1] - 2.0 * u[0] + u[1]) / hh)
    lap[-1] = 2.0 * ((u[-2] - 2.0 * u[-1] + u[-2]) / hh)
    R = 2.0 * (1.0 - lap) / w
    dw = -2.0 * (1.0 - lap)
    return dw, R


def sphere_rhs(w, cot, h):
    w = np.asarray(w, dtype=float)
    u = 0.5 * np.log(w)
    return _sphere_rhs(w, u, np.asarray(cot, dtype=float), h)


def rk4_dumbbell(psi, phi, h, dt, dirichlet, k1psi, k1phi):
    psi = np.asarray(psi, dtype=float)
    phi = np.asarray(phi, dtype=float)
    half = 0.5 * dt
    sixth = dt / 6.0
    k2psi, k2phi, _, _ = dumbbell_rhs(psi + half * k1psi, phi + half * k1phi, h, dirichlet)
    k3psi, k3phi, _, _ = dumbbell_rhs(psi + half * k2psi, phi + half * k2phi, h, dirichlet)
    k4psi, k4phi, _, _ = dumbbell_rhs(psi + dt * k3psi, phi + dt * k3phi, h, dirichlet)
    out_psi = psi + sixth * (k1psi + 2.0 * k2psi + 2.0 * k3psi + k4psi)
    out_phi = phi + sixth * (k1phi + 2.0 * k2phi + 2.0 * k3phi + k4phi)
    return out_psi, out_phi


def rk4_sphere(w, cot, h, dt, k1):
    w = np.asarray(w, dtype=float)
    cot = np.asarray(cot, dtype=float)
    half = 0.5 * dt
    sixth = dt / 6.0
    y = w + half * k1
    k2, _ = _sphere_rhs(y, 0.5 * np.log(y), cot, h)
    y = w + half * k2
    k3, _ = _sphere_rhs(y, 0.5 * np.log(y), cot, h)
    y = w + dt * k3
    k4, _ = _sphere_rhs(y, 0.5 * np.log(y), cot, h)
    return w + sixth * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def reduce_boundary(indptr, indices, dims, clearing):
    """Column reduction over GF(2) with columns stored as int bitsets."""
    m = len(dims)
    low = np.full(m, -1, dtype=np.int64)
    cols = [0] * m
    owner = {}
    indptr = [int(v) for v in indptr]
    indices = [int(v) for v in indices]
    dims = [int(v) for v in dims]

    def reduce_column(j):
        col = 0
        for k in range(indptr[j], indptr[j + 1]):
            col |= 1 << indices[k]
        while col:
            piv = col.bit_length() - 1
            other = owner.get(piv)
            if other is None:
                break
            col ^= cols[other]
        cols[j] = col
        if col:
            piv = col.bit_length() - 1
            owner[piv] = j
            low[j] = piv
            return piv
        return -1

    if clearing:
        top = max(dims, default=0)
        cleared = bytearray(m)
        for d in range(top, 0, -1):
            for j in range(m):
                if dims[j] != d or cleared[j]:
                    continue
                piv = reduce_column(j)
                if piv >= 0:
                    cleared[piv] = 1
                    cols[piv] = 0
    else:
        for j in range(m):
            reduce_column(j)
    return low

"""Sequential numba kernels for the hot numeric paths.

Everything here runs single-threaded on purpose: reductions accumulate in a
fixed ascending index order, so results are bit-reproducible regardless of the
host's thread count, and repeated runs of the same inputs give identical bytes.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def transport_update(data, ghost_lo, ghost_hi, e, wxp, wxm, dt_dv):
    """One upwind sweep in correction form.

    data       : (n_x, m) distribution values, m = 2*n_v + 1
    ghost_lo   : (n_x,) Neumann ghost row below the first velocity node
    ghost_hi   : (n_x,) Neumann ghost row above the last velocity node
    e          : (n_x,) field values
    wxp, wxm   : (m,) spatial weights dt/dx*max(v_j,0) and dt/dx*(-min(v_j,0))
    dt_dv      : dt/dv

    The update is written as ``f_c + sum_k w_k*(neighbor_k - f_c)``, which is
    the same convex combination as ``(1-sum w)*f_c + sum w_k*neighbor_k`` but
    is exact when a neighbor equals the center (zero gradients stay zero).
    Output ghost rows are refreshed to copies of the output boundary rows.
    """
    n_x, m = data.shape
    out = np.empty_like(data)
    for i in range(n_x):
        im = i - 1 if i > 0 else n_x - 1
        ip = i + 1 if i < n_x - 1 else 0
        ei = e[i]
        wep = dt_dv * ei if ei > 0.0 else 0.0    # weight on the j-1 neighbor
        wem = -dt_dv * ei if ei < 0.0 else 0.0   # weight on the j+1 neighbor
        for j in range(m):
            fc = data[i, j]
            fs = data[i, j - 1] if j > 0 else ghost_lo[i]
            fn = data[i, j + 1] if j < m - 1 else ghost_hi[i]
            out[i, j] = (fc
                         + wxp[j] * (data[im, j] - fc)
                         + wxm[j] * (data[ip, j] - fc)
                         + wep * (fs - fc)
                         + wem * (fn - fc))
    oglo = out[:, 0].copy()
    oghi = out[:, m - 1].copy()
    return out, oglo, oghi


@njit(cache=True)
def moments(data, v, dv):
    """Raw velocity moments m0, m1, m2 per spatial node.

    Sums run sequentially over ascending j (then scale by dv), so the
    reduction order is fixed.
    """
    n_x, m = data.shape
    m0 = np.empty(n_x)
    m1 = np.empty(n_x)
    m2 = np.empty(n_x)
    for i in range(n_x):
        s0 = 0.0
        s1 = 0.0
        s2 = 0.0
        for j in range(m):
            fij = data[i, j]
            s0 += fij
            s1 += v[j] * fij
            s2 += v[j] * v[j] * fij
        m0[i] = s0 * dv
        m1[i] = s1 * dv
        m2[i] = s2 * dv
    return m0, m1, m2


@njit(cache=True)
def moments_compensated(data, v, dv):
    """Kahan-compensated variant of :func:`moments`, same ascending-j order."""
    n_x, m = data.shape
    m0 = np.empty(n_x)
    m1 = np.empty(n_x)
    m2 = np.empty(n_x)
    for i in range(n_x):
        s0 = 0.0
        c0 = 0.0
        s1 = 0.0
        c1 = 0.0
        s2 = 0.0
        c2 = 0.0
        for j in range(m):
            fij = data[i, j]
            y = fij - c0
            t = s0 + y
            c0 = (t - s0) - y
            s0 = t
            term = v[j] * fij
            y = term - c1
            t = s1 + y
            c1 = (t - s1) - y
            s1 = t
            term = v[j] * v[j] * fij
            y = term - c2
            t = s2 + y
            c2 = (t - s2) - y
            s2 = t
        m0[i] = s0 * dv
        m1[i] = s1 * dv
        m2[i] = s2 * dv
    return m0, m1, m2


@njit(cache=True, inline="always")
def maxwellian_at(rho_i, u_i, t_i, vj):
    """Gaussian profile rho/sqrt(2*pi*T) * exp(-(v-U)^2 / (2T)) at one node."""
    z = vj - u_i
    return rho_i / np.sqrt(2.0 * np.pi * t_i) * np.exp(-(z * z) / (2.0 * t_i))


@njit(cache=True)
def maxwellian_table(rho, u, temp, v, v_lo, v_hi):
    """Tabulate the local Maxwellian on the grid, ghosts at v_lo / v_hi."""
    n_x = rho.shape[0]
    m = v.shape[0]
    data = np.empty((n_x, m))
    glo = np.empty(n_x)
    ghi = np.empty(n_x)
    for i in range(n_x):
        ri = rho[i]
        ui = u[i]
        ti = temp[i]
        for j in range(m):
            data[i, j] = maxwellian_at(ri, ui, ti, v[j])
        glo[i] = maxwellian_at(ri, ui, ti, v_lo)
        ghi[i] = maxwellian_at(ri, ui, ti, v_hi)
    return data, glo, ghi


@njit(cache=True)
def imex_combine(ft, rho, u, temp, v, eps, dt):
    """Fused relaxation step: (eps*ft + dt*Maxwellian)/(eps + dt) per node.

    Uses the same scalar Maxwellian expression as :func:`maxwellian_table`,
    so the fused path is bit-identical to tabulating the Maxwellian first and
    combining elementwise.  Output ghosts copy the output boundary rows.
    """
    n_x, m = ft.shape
    out = np.empty_like(ft)
    denom = eps + dt
    for i in range(n_x):
        ri = rho[i]
        ui = u[i]
        ti = temp[i]
        for j in range(m):
            mx = maxwellian_at(ri, ui, ti, v[j])
            out[i, j] = (eps * ft[i, j] + dt * mx) / denom
    oglo = out[:, 0].copy()
    oghi = out[:, m - 1].copy()
    return out, oglo, oghi


@njit(cache=True)
def field_direct(g, x):
    """Direct kernel sum E_i = sum_k K(x_i, x_k) * g_k in ascending k order.

    g is the pre-scaled charge deviation (rho - 1)*dx; the kernel on the unit
    torus is K(x, y) = y for y <= x and y - 1 for y > x, which for ascending
    nodes reduces to the index test k <= i.
    """
    n = g.shape[0]
    e = np.empty(n)
    for i in range(n):
        acc = 0.0
        for k in range(n):
            kern = x[k] if k <= i else x[k] - 1.0
            acc += kern * g[k]
        e[i] = acc
    return e


@njit(cache=True)
def step_stats(data, dv, dx):
    """Total mass and min value over the non-ghost nodes, one fused pass.

    The mass accumulates exactly like ``seq_sum(moments(...)[0]) * dx`` so the
    two routes agree bitwise.
    """
    n_x, m = data.shape
    total = 0.0
    fmin = data[0, 0]
    for i in range(n_x):
        s0 = 0.0
        for j in range(m):
            fij = data[i, j]
            s0 += fij
            if fij < fmin:
                fmin = fij
        total += s0 * dv
    return total * dx, fmin


@njit(cache=True)
def seq_sum(a):
    """Plain ascending-index sequential sum of a 1D array."""
    s = 0.0
    for k in range(a.shape[0]):
        s += a[k]
    return s

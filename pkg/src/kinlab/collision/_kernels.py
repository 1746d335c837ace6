"""Compiled quadrature loops for the collision operator.

Velocities live on the midpoint grid of ``n`` nodes per axis whose first node
sits at ``v0``. Off-grid values use trilinear interpolation plus a per-axis
second-difference correction taken at the nearest node, so that quadratic
polynomials are reproduced exactly. The stencil has 11 nodes.

Collisions are parametrised by the pair (u, v) and omega on the hemisphere
around a = (u - v)/|u - v|: omega = c a + sqrt(1 - c^2)(cos phi e1 + sin phi e2),
u' = u - |u - v| c omega, v' = v + |u - v| c omega. The angular weights ``wc``
already contain b(c), the azimuthal spacing and the factor 2 from folding the
sphere onto the hemisphere.
"""
from __future__ import annotations

import math

import numpy as np
from numba import njit


@njit(cache=True, inline="always")
def _frame(ax, ay, az):
    if abs(ax) < 0.9:
        hx, hy, hz = 1.0, 0.0, 0.0
    else:
        hx, hy, hz = 0.0, 1.0, 0.0
    d = hx * ax + hy * ay + hz * az
    e1x, e1y, e1z = hx - d * ax, hy - d * ay, hz - d * az
    nrm = math.sqrt(e1x * e1x + e1y * e1y + e1z * e1z)
    e1x /= nrm
    e1y /= nrm
    e1z /= nrm
    e2x = ay * e1z - az * e1y
    e2y = az * e1x - ax * e1z
    e2z = ax * e1y - ay * e1x
    return e1x, e1y, e1z, e2x, e2y, e2z


@njit(cache=True, inline="always")
def _stencil(x, y, z, n, v0, inv_h, vmax2, si, sj, sk, sw):
    """Fill the 11-node stencil of (x, y, z). Returns 0 outside the ball, else 11."""
    if x * x + y * y + z * z > vmax2:
        return 0
    px = (x - v0) * inv_h
    py = (y - v0) * inv_h
    pz = (z - v0) * inv_h
    i0 = int(math.floor(px))
    j0 = int(math.floor(py))
    k0 = int(math.floor(pz))
    fx = px - i0
    fy = py - j0
    fz = pz - k0
    m = 0
    for a in range(2):
        wa = fx if a == 1 else 1.0 - fx
        for b in range(2):
            wb = fy if b == 1 else 1.0 - fy
            for c in range(2):
                wcc = fz if c == 1 else 1.0 - fz
                si[m] = i0 + a
                sj[m] = j0 + b
                sk[m] = k0 + c
                sw[m] = wa * wb * wcc
                m += 1
    rx = 1 if fx >= 0.5 else 0
    ry = 1 if fy >= 0.5 else 0
    rz = 1 if fz >= 0.5 else 0
    qx = -0.5 * fx * (1.0 - fx)
    qy = -0.5 * fy * (1.0 - fy)
    qz = -0.5 * fz * (1.0 - fz)
    near = rx * 4 + ry * 2 + rz
    sw[near] -= 2.0 * (qx + qy + qz)
    sw[(1 - rx) * 4 + ry * 2 + rz] += qx
    sw[rx * 4 + (1 - ry) * 2 + rz] += qy
    sw[rx * 4 + ry * 2 + (1 - rz)] += qz
    si[8] = i0 + (2 if rx == 1 else -1)
    sj[8] = j0 + ry
    sk[8] = k0 + rz
    sw[8] = qx
    si[9] = i0 + rx
    sj[9] = j0 + (2 if ry == 1 else -1)
    sk[9] = k0 + rz
    sw[9] = qy
    si[10] = i0 + rx
    sj[10] = j0 + ry
    sk[10] = k0 + (2 if rz == 1 else -1)
    sw[10] = qz
    return 11


@njit(cache=True, inline="always")
def _at(F, i, j, k, n):
    if i < 0 or j < 0 or k < 0 or i >= n or j >= n or k >= n:
        return 0.0
    return F[i, j, k]
@njit(cache=True, inline="always")
def _value(F, x, y, z, n, v0, inv_h, vmax2):
    """Interpolated value of the nodal field F at (x, y, z); zero outside the ball."""
    if x * x + y * y + z * z > vmax2:
        return 0.0
    px = (x - v0) * inv_h; py = (y - v0) * inv_h; pz = (z - v0) * inv_h
    i0 = int(math.floor(px)); j0 = int(math.floor(py)); k0 = int(math.floor(pz))
    fx = px - i0; fy = py - j0; fz = pz - k0
    rx = 1 if fx >= 0.5 else 0
    ry = 1 if fy >= 0.5 else 0
    rz = 1 if fz >= 0.5 else 0
    ni = i0 + rx; nj = j0 + ry; nk = k0 + rz
    if i0 >= 1 and j0 >= 1 and k0 >= 1 and i0 <= n - 3 and j0 <= n - 3 and k0 <= n - 3:
        c000 = F[i0, j0, k0]; c001 = F[i0, j0, k0 + 1]; c010 = F[i0, j0 + 1, k0]; c011 = F[i0, j0 + 1, k0 + 1]
        c100 = F[i0 + 1, j0, k0]; c101 = F[i0 + 1, j0, k0 + 1]; c110 = F[i0 + 1, j0 + 1, k0]; c111 = F[i0 + 1, j0 + 1, k0 + 1]
        fn = F[ni, nj, nk]
        dxx = F[ni + 1, nj, nk] - 2.0 * fn + F[ni - 1, nj, nk]
        dyy = F[ni, nj + 1, nk] - 2.0 * fn + F[ni, nj - 1, nk]
        dzz = F[ni, nj, nk + 1] - 2.0 * fn + F[ni, nj, nk - 1]
    else:
        c000 = _at(F, i0, j0, k0, n); c001 = _at(F, i0, j0, k0 + 1, n); c010 = _at(F, i0, j0 + 1, k0, n); c011 = _at(F, i0, j0 + 1, k0 + 1, n)
        c100 = _at(F, i0 + 1, j0, k0, n); c101 = _at(F, i0 + 1, j0, k0 + 1, n); c110 = _at(F, i0 + 1, j0 + 1, k0, n); c111 = _at(F, i0 + 1, j0 + 1, k0 + 1, n)
        fn = _at(F, ni, nj, nk, n)
        dxx = _at(F, ni + 1, nj, nk, n) - 2.0 * fn + _at(F, ni - 1, nj, nk, n)
        dyy = _at(F, ni, nj + 1, nk, n) - 2.0 * fn + _at(F, ni, nj - 1, nk, n)
        dzz = _at(F, ni, nj, nk + 1, n) - 2.0 * fn + _at(F, ni, nj, nk - 1, n)
    c00 = c000 + fz * (c001 - c000); c01 = c010 + fz * (c011 - c010)
    c10 = c100 + fz * (c101 - c100); c11 = c110 + fz * (c111 - c110)
    c0 = c00 + fy * (c01 - c00); c1 = c10 + fy * (c11 - c10)
    return c0 + fx * (c1 - c0) - 0.5 * (fx * (1.0 - fx) * dxx + fy * (1.0 - fy) * dyy + fz * (1.0 - fz) * dzz)

@njit(cache=True)
def interpolate(F, pts, n, v0, h, vmax2):
    """Interpolate the nodal field ``F`` (zero outside the ball) at ``pts`` (m, 3)."""
    out = np.empty(pts.shape[0])
    inv_h = 1.0 / h
    for p in range(pts.shape[0]):
        out[p] = _value(F, pts[p, 0], pts[p, 1], pts[p, 2], n, v0, inv_h, vmax2)
    return out


@njit(cache=True)
def collide_strong(F1, F2, act, coords, n, v0, h, vmax2, gamma, cvals, wc, cphi, sphi):
    """Strong-form Q(F1, F2) at the active nodes (gain minus loss)."""
    na = coords.shape[0]
    npol = cvals.shape[0]
    naz = cphi.shape[0]
    inv_h = 1.0 / h
    wsum = 0.0
    for p in range(npol):
        wsum += wc[p] * naz
    out = np.zeros(na)
    for a in range(na):
        vx, vy, vz = coords[a, 0], coords[a, 1], coords[a, 2]
        f2v = F2[act[a, 0], act[a, 1], act[a, 2]]
        gain = 0.0
        loss = 0.0
        for b in range(na):
            if b == a:
                continue
            ux, uy, uz = coords[b, 0], coords[b, 1], coords[b, 2]
            dx, dy, dz = ux - vx, uy - vy, uz - vz
            r = math.sqrt(dx * dx + dy * dy + dz * dz)
            kr = r**gamma
            loss += kr * F1[act[b, 0], act[b, 1], act[b, 2]]
            ax, ay, az = dx / r, dy / r, dz / r
            e1x, e1y, e1z, e2x, e2y, e2z = _frame(ax, ay, az)
            g = 0.0
            for p in range(npol):
                c = cvals[p]
                s = math.sqrt(1.0 - c * c)
                rc = r * c
                acc = 0.0
                for q in range(naz):
                    ox = c * ax + s * (cphi[q] * e1x + sphi[q] * e2x)
                    oy = c * ay + s * (cphi[q] * e1y + sphi[q] * e2y)
                    oz = c * az + s * (cphi[q] * e1z + sphi[q] * e2z)
                    f1 = _value(F1, ux - rc * ox, uy - rc * oy, uz - rc * oz, n, v0, inv_h, vmax2)
                    if f1 == 0.0:
                        continue
                    f2 = _value(F2, vx + rc * ox, vy + rc * oy, vz + rc * oz, n, v0, inv_h, vmax2)
                    acc += f1 * f2
                g += wc[p] * acc
            gain += kr * g
        out[a] = h**3 * (gain - wsum * loss * f2v)
    return out


@njit(cache=True)
def frequency(F, coords_out, coords_in, f_in, gamma, wsum, weight):
    """nu(v) = sum_u weight |v - u|^gamma F(u) * (total angular weight)."""
    out = np.zeros(coords_out.shape[0])
    for a in range(coords_out.shape[0]):
        acc = 0.0
        for b in range(coords_in.shape[0]):
            dx = coords_in[b, 0] - coords_out[a, 0]
            dy = coords_in[b, 1] - coords_out[a, 1]
            dz = coords_in[b, 2] - coords_out[a, 2]
            r2 = dx * dx + dy * dy + dz * dz
            if r2 == 0.0:
                if gamma == 0.0:
                    acc += f_in[b]
                continue
            acc += r2 ** (0.5 * gamma) * f_in[b]
        out[a] = acc * weight * wsum
    return out


@njit(cache=True, inline="always")
def _post_rows(x, y, z, idx3, n, v0, inv_h, vmax2, si, sj, sk, sw, rows, vals, off, scale):
    """Write the stencil of a post-collision point as active-node rows; False if it leaves the active set."""
    m = _stencil(x, y, z, n, v0, inv_h, vmax2, si, sj, sk, sw)
    if m == 0:
        return False
    for t in range(11):
        i, j, k = si[t], sj[t], sk[t]
        if i < 0 or j < 0 or k < 0 or i >= n or j >= n or k >= n:
            return False
        row = idx3[i, j, k]
        if row < 0:
            return False
        rows[off + t] = row
        vals[off + t] = sw[t] * scale[row]
    return True


@njit(cache=True)
def dirichlet_form(g, coords, idx3, n, v0, h, vmax2, gamma, cvals, wc, cphi, sphi, mu, dense):
    """Symmetric linearised operator from its quadratic form.

    <L g, g> = 1/4 sum W_u W_v W_w |u-v|^gamma mu(u) mu(v) (phi' + phi'_* - phi - phi_*)^2
    with phi = g / sqrt(mu). Collisions whose post-collision stencil leaves the
    active set are dropped as a whole, which keeps the operator symmetric and
    its kernel equal to the collision invariants. With ``dense`` the matrix is
    returned, otherwise L applied to ``g``.
    """
    na = coords.shape[0]
    npol = cvals.shape[0]
    naz = cphi.shape[0]
    inv_h = 1.0 / h
    W = h**3
    scale = 1.0 / np.sqrt(mu)
    si = np.empty(11, np.int64)
    sj = np.empty(11, np.int64)
    sk = np.empty(11, np.int64)
    sw = np.empty(11)
    rows = np.empty(24, np.int64)
    vals = np.empty(24)
    if dense:
        A = np.zeros((na, na))
        out = np.zeros(1)
    else:
        A = np.zeros((1, 1))
        out = np.zeros(na)
    for a in range(na):
        ux, uy, uz = coords[a, 0], coords[a, 1], coords[a, 2]
        for b in range(a + 1, na):
            vx, vy, vz = coords[b, 0], coords[b, 1], coords[b, 2]
            dx, dy, dz = ux - vx, uy - vy, uz - vz
            r = math.sqrt(dx * dx + dy * dy + dz * dz)
            base = 0.5 * W * W * r**gamma * mu[a] * mu[b]
            ax, ay, az = dx / r, dy / r, dz / r
            e1x, e1y, e1z, e2x, e2y, e2z = _frame(ax, ay, az)
            rows[22] = a
            vals[22] = -scale[a]
            rows[23] = b
            vals[23] = -scale[b]
            for p in range(npol):
                c = cvals[p]
                s = math.sqrt(1.0 - c * c)
                rc = r * c
                coef = base * wc[p]
                for q in range(naz):
                    ox = c * ax + s * (cphi[q] * e1x + sphi[q] * e2x)
                    oy = c * ay + s * (cphi[q] * e1y + sphi[q] * e2y)
                    oz = c * az + s * (cphi[q] * e1z + sphi[q] * e2z)
                    if not _post_rows(ux - rc * ox, uy - rc * oy, uz - rc * oz, idx3, n, v0, inv_h, vmax2,
                                      si, sj, sk, sw, rows, vals, 0, scale):
                        continue
                    if not _post_rows(vx + rc * ox, vy + rc * oy, vz + rc * oz, idx3, n, v0, inv_h, vmax2,
                                      si, sj, sk, sw, rows, vals, 11, scale):
                        continue
                    if dense:
                        for i in range(24):
                            ci = coef * vals[i]
                            ri = rows[i]
                            for j in range(24):
                                A[ri, rows[j]] += ci * vals[j]
                    else:
                        d = 0.0
                        for i in range(24):
                            d += vals[i] * g[rows[i]]
                        d *= coef
                        for i in range(24):
                            out[rows[i]] += d * vals[i]
    return A / W, out / W


@njit(cache=True, inline="always")
def _maxwell(x, y, z, rho, ux, uy, uz, T):
    d2 = (x - ux) ** 2 + (y - uy) ** 2 + (z - uz) ** 2
    return rho / (2.0 * math.pi * T) ** 1.5 * math.exp(-d2 / (2.0 * T))


@njit(cache=True)
def k_split(G, coords_out, n, v0, h, vmax2, gamma, r_nodes, r_wts, dirs, dir_w,
            cvals, wc, cphi, sphi, rho, ux, uy, uz, T, TM):
    """Apply K1 and K2 of the split L_M = nu + K1 - K2 to each field in ``G``.

    u = v + r n with n on the unit sphere; ``r_wts`` carries r^2 and any cutoff.
    mu has parameters (rho, u, T); the weight Maxwellian mu_M is centred with
    temperature TM.
    """
    ng = G.shape[0]
    no = coords_out.shape[0]
    npol = cvals.shape[0]
    naz = cphi.shape[0]
    inv_h = 1.0 / h
    wsum = 0.0
    for p in range(npol):
        wsum += wc[p] * naz
    k1 = np.zeros((ng, no))
    k2 = np.zeros((ng, no))
    for a in range(no):
        vx, vy, vz = coords_out[a, 0], coords_out[a, 1], coords_out[a, 2]
        mu_v = _maxwell(vx, vy, vz, rho, ux, uy, uz, T)
        smv = math.sqrt(_maxwell(vx, vy, vz, 1.0, 0.0, 0.0, 0.0, TM))
        for ir in range(r_nodes.shape[0]):
            r = r_nodes[ir]
            wr = r_wts[ir] * r**gamma
            if wr == 0.0:
                continue
            for d in range(dirs.shape[0]):
                nx, ny, nz = dirs[d, 0], dirs[d, 1], dirs[d, 2]
                ox0, oy0, oz0 = vx + r * nx, vy + r * ny, vz + r * nz
                wd = wr * dir_w[d]
                fac = wd * wsum * math.sqrt(_maxwell(ox0, oy0, oz0, 1.0, 0.0, 0.0, 0.0, TM)) * mu_v / smv
                for gi in range(ng):
                    k1[gi, a] += fac * _value(G[gi], ox0, oy0, oz0, n, v0, inv_h, vmax2)
                e1x, e1y, e1z, e2x, e2y, e2z = _frame(nx, ny, nz)
                for p in range(npol):
                    c = cvals[p]
                    s = math.sqrt(1.0 - c * c)
                    rc = r * c
                    wp = wd * wc[p] / smv
                    for q in range(naz):
                        ox = c * nx + s * (cphi[q] * e1x + sphi[q] * e2x)
                        oy = c * ny + s * (cphi[q] * e1y + sphi[q] * e2y)
                        oz = c * nz + s * (cphi[q] * e1z + sphi[q] * e2z)
                        upx, upy, upz = ox0 - rc * ox, oy0 - rc * oy, oz0 - rc * oz
                        vpx, vpy, vpz = vx + rc * ox, vy + rc * oy, vz + rc * oz
                        f_v = wp * _maxwell(upx, upy, upz, rho, ux, uy, uz, T) * math.sqrt(
                            _maxwell(vpx, vpy, vpz, 1.0, 0.0, 0.0, 0.0, TM))
                        f_u = wp * _maxwell(vpx, vpy, vpz, rho, ux, uy, uz, T) * math.sqrt(
                            _maxwell(upx, upy, upz, 1.0, 0.0, 0.0, 0.0, TM))
                        for gi in range(ng):
                            k2[gi, a] += f_v * _value(G[gi], vpx, vpy, vpz, n, v0, inv_h, vmax2) + f_u * _value(
                                G[gi], upx, upy, upz, n, v0, inv_h, vmax2)
    return k1, k2

# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled stepping kernels: classical RK4 and the Lindblad RK4 stepper.

Same contract as heraldsim._core.fallback: the master equation is stepped
in the interaction picture of the plan's rotating diagonal.  The
Hamiltonian commutator uses one BLAS zgemm per stage (hermiticity of H and
rho gives the second product by conjugate transposition); assembly,
dissipators and the RK4 combinations are fused C loops over precomputed
sparse structures.
"""
import numpy as np

cimport numpy as cnp
from libc.math cimport cos, exp, sin
from libc.string cimport memset
from scipy.linalg.cython_blas cimport zgemm

cnp.import_array()

ctypedef double complex cplx

BACKEND_NAME = "compiled"

cdef char TRANS_N = 78  # ASCII 'N'

DEF TILE = 32


cdef inline cplx _drive(double t, double[:, ::1] pt) noexcept nogil:
    cdef int k
    cdef double env, ph
    cdef cplx out = 0
    for k in range(pt.shape[0]):
        env = pt[k, 2] * exp(-((t - pt[k, 0]) ** 2) / (2.0 * pt[k, 1] * pt[k, 1]))
        ph = pt[k, 4] - pt[k, 3] * t
        out = out + env * (cos(ph) + 1j * sin(ph))
    return out


cdef inline void _crhs(double t, cplx *y, cplx *dy, double *c,
                       double[:, ::1] pt) noexcept nogil:
    cdef double J = c[0], kp = c[1], km = c[2], Op = c[3], Om = c[4], gam = c[5], g = c[6]
    cdef double s2 = 1.4142135623730951
    cdef cplx f = _drive(t, pt)
    cdef cplx ap = y[0], am = y[1], bp = y[2], bm = y[3]
    dy[0] = -1j * ((J + g * s2 * bp.real - 0.5j * kp) * ap + g * s2 * bm.real * am + f / s2)
    dy[1] = -1j * ((-J + g * s2 * bm.real - 0.5j * km) * am + g * s2 * bp.real * ap + f / s2)
    dy[2] = -1j * ((Op - 0.5j * gam) * bp + Om * bm
                   + (g / s2) * (ap.real * ap.real + ap.imag * ap.imag
                                 + am.real * am.real + am.imag * am.imag))
    dy[3] = -1j * ((Op - 0.5j * gam) * bm + Om * bp
                   + (g / s2) * (ap.conjugate() * am + am.conjugate() * ap))


def classical_rk4(y0, double t0, double dt, int nsteps, coeffs, pulse_table):
    cdef cnp.ndarray[cplx, ndim=2] out = np.empty((nsteps + 1, 4), dtype=np.complex128)
    cdef cnp.ndarray[double, ndim=1] cc = np.ascontiguousarray(coeffs, dtype=np.float64)
    cdef double[:, ::1] pt = np.ascontiguousarray(
        np.asarray(pulse_table, dtype=np.float64).reshape(-1, 5))
    cdef cplx[:, ::1] o = out
    cdef cplx y[4]
    cdef cplx k1[4]
    cdef cplx k2[4]
    cdef cplx k3[4]
    cdef cplx k4[4]
    cdef cplx tmp[4]
    cdef double *c = <double *> cc.data
    cdef double t
    cdef int i, m
    cdef cnp.ndarray[cplx, ndim=1] y0a = np.ascontiguousarray(y0, dtype=np.complex128)
    for m in range(4):
        y[m] = y0a[m]
        o[0, m] = y[m]
    with nogil:
        for i in range(nsteps):
            t = t0 + i * dt
            _crhs(t, y, k1, c, pt)
            for m in range(4):
                tmp[m] = y[m] + 0.5 * dt * k1[m]
            _crhs(t + 0.5 * dt, tmp, k2, c, pt)
            for m in range(4):
                tmp[m] = y[m] + 0.5 * dt * k2[m]
            _crhs(t + 0.5 * dt, tmp, k3, c, pt)
            for m in range(4):
                tmp[m] = y[m] + dt * k3[m]
            _crhs(t + dt, tmp, k4, c, pt)
            for m in range(4):
                y[m] = y[m] + (dt / 6.0) * (k1[m] + 2.0 * k2[m] + 2.0 * k3[m] + k4[m])
                o[i + 1, m] = y[m]
    return out


cdef void _qrhs(cplx *rho, cplx *coeff, double t, cplx *hbuf, cplx *pbuf, cplx *out,
                int d,
                int *ti, int *tj, cplx *tv, double *tth, int *toff, int *tmode,
                int *tcol, int nblocks,
                int *jsrc, int *jdst, double *jw, int *joff, int njumps,
                double *dtot) noexcept nogil:
    cdef int n2 = d * d
    cdef int k, a, b, i, j, mi, i1, j1, ib, jb
    cdef cplx c, v
    cdef double wa, ph
    cdef cplx one = 1.0, zero = 0.0
    memset(hbuf, 0, n2 * sizeof(cplx))
    for k in range(nblocks):
        c = coeff[tcol[k]]
        if tmode[k] == 0:
            c = c.real
        elif tmode[k] == 2:
            c = c.conjugate()
        for a in range(toff[k], toff[k + 1]):
            ph = tth[a] * t
            v = c * tv[a] * (cos(ph) + 1j * sin(ph))
            hbuf[ti[a] * d + tj[a]] = hbuf[ti[a] * d + tj[a]] + v
    # P = H @ rho for C-ordered buffers: BLAS sees transposes, so swap operands.
    zgemm(&TRANS_N, &TRANS_N, &d, &d, &d, &one, rho, &d, hbuf, &d, &zero, pbuf, &d)
    # out = -i (P - P^dag) - (dtot_i + dtot_j)/2 * rho   (rho, H Hermitian);
    # tiled to keep the transposed read of P cache-resident.
    for ib in range(0, d, TILE):
        i1 = ib + TILE
        if i1 > d:
            i1 = d
        for jb in range(0, d, TILE):
            j1 = jb + TILE
            if j1 > d:
                j1 = d
            for i in range(ib, i1):
                for j in range(jb, j1):
                    v = pbuf[i * d + j] - pbuf[j * d + i].conjugate()
                    out[i * d + j] = -1j * v - 0.5 * (dtot[i] + dtot[j]) * rho[i * d + j]
    # sandwich terms o rho o^dag, one nonzero per column of each jump op
    for k in range(njumps):
        for a in range(joff[k], joff[k + 1]):
            i = jsrc[a]
            mi = jdst[a] * d
            wa = jw[a]
            for b in range(joff[k], joff[k + 1]):
                out[mi + jdst[b]] = out[mi + jdst[b]] + wa * jw[b] * rho[i * d + jsrc[b]]


def lindblad_rk4(rho, coeffs, double t0, double dt, plan):
    cdef cnp.ndarray[cplx, ndim=2] r = rho
    if not r.flags.c_contiguous:
        raise ValueError("rho must be C-contiguous")
    cdef cnp.ndarray[cplx, ndim=2] cf = np.ascontiguousarray(coeffs, dtype=np.complex128)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] ti = plan.term_i
    cdef cnp.ndarray[cnp.int32_t, ndim=1] tj = plan.term_j
    cdef cnp.ndarray[cplx, ndim=1] tv = plan.term_v
    cdef cnp.ndarray[double, ndim=1] tth = plan.term_theta
    cdef cnp.ndarray[cnp.int32_t, ndim=1] toff = plan.term_off
    cdef cnp.ndarray[cnp.int32_t, ndim=1] tmode = plan.term_mode
    cdef cnp.ndarray[cnp.int32_t, ndim=1] tcol = plan.term_col
    cdef cnp.ndarray[cnp.int32_t, ndim=1] jsrc = plan.jump_src
    cdef cnp.ndarray[cnp.int32_t, ndim=1] jdst = plan.jump_dst
    cdef cnp.ndarray[double, ndim=1] jw = plan.jump_w
    cdef cnp.ndarray[cnp.int32_t, ndim=1] joff = plan.jump_off
    cdef cnp.ndarray[double, ndim=1] dtot = plan.dtot
    cdef int d = plan.dim
    cdef int n2 = d * d
    cdef int nterms = plan.n_coeffs
    cdef int nblocks = plan.n_blocks
    cdef int njumps = len(joff) - 1
    cdef int nsteps = (cf.shape[0] - 1) // 2
    if cf.shape[1] != nterms:
        raise ValueError("coefficient columns do not match plan terms")

    cdef cnp.ndarray[cplx, ndim=2] work = np.empty((5, n2), dtype=np.complex128)
    cdef cplx *hbuf = <cplx *> work.data
    cdef cplx *pbuf = hbuf + n2
    cdef cplx *kbuf = hbuf + 2 * n2
    cdef cplx *acc = hbuf + 3 * n2
    cdef cplx *stage = hbuf + 4 * n2
    cdef cplx *rp = <cplx *> r.data
    cdef cplx *cp = <cplx *> cf.data
    cdef int s, m
    cdef double t
    cdef int *tip = <int *> ti.data
    cdef int *tjp = <int *> tj.data
    cdef cplx *tvp = <cplx *> tv.data
    cdef double *tthp = <double *> tth.data
    cdef int *toffp = <int *> toff.data
    cdef int *tmodep = <int *> tmode.data
    cdef int *tcolp = <int *> tcol.data
    cdef int *jsp = <int *> jsrc.data
    cdef int *jdp = <int *> jdst.data
    cdef double *jwp = <double *> jw.data
    cdef int *joffp = <int *> joff.data
    cdef double *dtp = <double *> dtot.data
    with nogil:
        for s in range(nsteps):
            t = t0 + s * dt
            _qrhs(rp, cp + (2 * s) * nterms, t, hbuf, pbuf, kbuf, d,
                  tip, tjp, tvp, tthp, toffp, tmodep, tcolp, nblocks,
                  jsp, jdp, jwp, joffp, njumps, dtp)
            for m in range(n2):
                acc[m] = kbuf[m]
                stage[m] = rp[m] + 0.5 * dt * kbuf[m]
            _qrhs(stage, cp + (2 * s + 1) * nterms, t + 0.5 * dt, hbuf, pbuf, kbuf, d,
                  tip, tjp, tvp, tthp, toffp, tmodep, tcolp, nblocks,
                  jsp, jdp, jwp, joffp, njumps, dtp)
            for m in range(n2):
                acc[m] = acc[m] + 2.0 * kbuf[m]
                stage[m] = rp[m] + 0.5 * dt * kbuf[m]
            _qrhs(stage, cp + (2 * s + 1) * nterms, t + 0.5 * dt, hbuf, pbuf, kbuf, d,
                  tip, tjp, tvp, tthp, toffp, tmodep, tcolp, nblocks,
                  jsp, jdp, jwp, joffp, njumps, dtp)
            for m in range(n2):
                acc[m] = acc[m] + 2.0 * kbuf[m]
                stage[m] = rp[m] + dt * kbuf[m]
            _qrhs(stage, cp + (2 * s + 2) * nterms, t + dt, hbuf, pbuf, kbuf, d,
                  tip, tjp, tvp, tthp, toffp, tmodep, tcolp, nblocks,
                  jsp, jdp, jwp, joffp, njumps, dtp)
            for m in range(n2):
                rp[m] = rp[m] + (dt / 6.0) * (acc[m] + kbuf[m])
    return rho

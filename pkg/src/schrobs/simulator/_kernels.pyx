# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled statevector kernels.

Each compiled gate fixes a set of bit positions (controls, plus the target for
2x2 gates). The free bits are enumerated with a counter into which zero bits
are inserted at the fixed positions, then the control pattern is OR-ed in.
Every amplitude is written at most once per gate.
"""
from libc.stdint cimport int32_t, int64_t

ctypedef double complex cplx

cdef enum:
    GENERAL = 0
    DIAGONAL = 1
    SUBSPACE_PHASE = 2
    FLIP = 3


cdef inline int64_t _expand(int64_t c, const int32_t* pos, int npos) noexcept nogil:
    cdef int i
    cdef int64_t lo
    for i in range(npos):
        lo = c & ((<int64_t>1 << pos[i]) - 1)
        c = ((c >> pos[i]) << (pos[i] + 1)) | lo
    return c


cdef void _apply(cplx* psi, int nq, int gtype, int target, int64_t cval,
                 const int32_t* pos, int npos, const cplx* m) noexcept nogil:
    cdef int64_t count = (<int64_t>1) << (nq - npos)
    cdef int64_t c, i0, i1
    cdef int64_t tbit = (<int64_t>1) << target
    cdef cplx a0, a1
    cdef cplx m00 = m[0], m01 = m[1], m10 = m[2], m11 = m[3]
    if gtype == SUBSPACE_PHASE:
        for c in range(count):
            i0 = _expand(c, pos, npos) | cval
            psi[i0] = psi[i0] * m00
    elif gtype == DIAGONAL:
        for c in range(count):
            i0 = _expand(c, pos, npos) | cval
            i1 = i0 | tbit
            psi[i0] = psi[i0] * m00
            psi[i1] = psi[i1] * m11
    elif gtype == FLIP:
        for c in range(count):
            i0 = _expand(c, pos, npos) | cval
            i1 = i0 | tbit
            a0 = psi[i0]
            psi[i0] = psi[i1]
            psi[i1] = a0
    else:
        for c in range(count):
            i0 = _expand(c, pos, npos) | cval
            i1 = i0 | tbit
            a0 = psi[i0]
            a1 = psi[i1]
            psi[i0] = m00 * a0 + m01 * a1
            psi[i1] = m10 * a0 + m11 * a1


def run_program(cplx[::1] psi, int nq, int32_t[::1] gtype, int32_t[::1] target,
                int64_t[::1] cval, int64_t[::1] pos_off, int32_t[::1] pos,
                cplx[:, ::1] mats, int repeats=1):
    """Apply the compiled gate list ``repeats`` times to ``psi`` in place."""
    cdef Py_ssize_t ng = gtype.shape[0]
    cdef Py_ssize_t g
    cdef int r
    cdef int32_t* pp = &pos[0] if pos.shape[0] > 0 else NULL
    with nogil:
        for r in range(repeats):
            for g in range(ng):
                _apply(&psi[0], nq, gtype[g], target[g], cval[g],
                       pp + pos_off[g], <int>(pos_off[g + 1] - pos_off[g]), &mats[g, 0])

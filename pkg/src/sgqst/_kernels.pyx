# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled Pauli kernels.

A Pauli string is passed as three integers: the bit-flip mask ``x``, the
phase mask ``z`` (sites carrying Y or Z) and the number of Y sites ``ny``.
It acts on basis states as P|b> = i**ny * (-1)**popcount(b & z) |b ^ x>.
"""
import numpy as np
cimport numpy as cnp

cnp.import_array()


cdef inline int _parity(long long v) nogil:
    cdef int p = 0
    while v:
        v &= v - 1
        p ^= 1
    return p


def pauli_expectations(const double complex[:, ::1] rho,
                       const long long[::1] xmask,
                       const long long[::1] zmask,
                       const long long[::1] ny):
    cdef Py_ssize_t dim = rho.shape[0]
    cdef Py_ssize_t nops = xmask.shape[0]
    cdef Py_ssize_t k, b
    cdef long long x, z
    cdef double re, im, tr, ti
    cdef double[::1] out
    result = np.empty(nops, dtype=np.float64)
    out = result
    with nogil:
        for k in range(nops):
            x = xmask[k]
            z = zmask[k]
            re = 0.0
            im = 0.0
            for b in range(dim):
                if _parity(b & z):
                    re -= rho[b, b ^ x].real
                    im -= rho[b, b ^ x].imag
                else:
                    re += rho[b, b ^ x].real
                    im += rho[b, b ^ x].imag
            # multiply by i**ny and keep the real part
            if ny[k] % 4 == 0:
                out[k] = re
            elif ny[k] % 4 == 1:
                out[k] = -im
            elif ny[k] % 4 == 2:
                out[k] = -re
            else:
                out[k] = im
    return result


def pauli_traces(const double complex[:, ::1] rho,
                 const long long[::1] xmask,
                 const long long[::1] zmask,
                 const long long[::1] ny):
    """Complex Tr(rho P) for each string; the imaginary part vanishes for Hermitian rho."""
    cdef Py_ssize_t dim = rho.shape[0]
    cdef Py_ssize_t nops = xmask.shape[0]
    cdef Py_ssize_t k, b
    cdef long long x, z
    cdef double complex acc
    cdef double complex[::1] out
    result = np.empty(nops, dtype=np.complex128)
    out = result
    with nogil:
        for k in range(nops):
            x = xmask[k]
            z = zmask[k]
            acc = 0
            for b in range(dim):
                if _parity(b & z):
                    acc = acc - rho[b, b ^ x]
                else:
                    acc = acc + rho[b, b ^ x]
            if ny[k] % 4 == 1:
                acc = 1j * acc
            elif ny[k] % 4 == 2:
                acc = -acc
            elif ny[k] % 4 == 3:
                acc = -1j * acc
            out[k] = acc
    return result


def pauli_combination(const double[::1] coeffs,
                      const long long[::1] xmask,
                      const long long[::1] zmask,
                      const long long[::1] ny,
                      Py_ssize_t dim):
    cdef Py_ssize_t nops = xmask.shape[0]
    cdef Py_ssize_t k, b
    cdef long long x, z
    cdef double c
    cdef double complex ph
    cdef double complex[:, ::1] m
    result = np.zeros((dim, dim), dtype=np.complex128)
    m = result
    with nogil:
        for k in range(nops):
            x = xmask[k]
            z = zmask[k]
            c = coeffs[k]
            if ny[k] % 4 == 0:
                ph = c
            elif ny[k] % 4 == 1:
                ph = 1j * c
            elif ny[k] % 4 == 2:
                ph = -c
            else:
                ph = -1j * c
            for b in range(dim):
                if _parity(b & z):
                    m[b ^ x, b] = m[b ^ x, b] - ph
                else:
                    m[b ^ x, b] = m[b ^ x, b] + ph
    return result

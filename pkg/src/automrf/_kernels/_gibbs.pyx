# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled sweep kernel. Mirror of gibbs_py.run_sweeps; keep in lockstep."""

from libc.math cimport exp


def run_sweeps(int[::1] labels,
               long long[::1] indptr,
               long long[::1] indices,
               double[:, ::1] unary,
               double gamma,
               long long[::1] order,
               double[::1] uniforms,
               int n_sweeps):
    cdef Py_ssize_t n = labels.shape[0]
    cdef int n_classes = <int> unary.shape[1]
    cdef Py_ssize_t t, oi, i, e, base
    cdef int k, lab
    cdef double mx, tot, u, cum, v, wk
    cdef double w[64]
    cdef long long counts[64]

    if n_classes > 64:
        raise ValueError("kernel supports at most 64 classes")

    for t in range(n_sweeps):
        base = t * n
        for oi in range(n):
            i = order[oi]
            for k in range(n_classes):
                counts[k] = 0
            for e in range(indptr[i], indptr[i + 1]):
                counts[labels[indices[e]]] += 1
            mx = unary[i, 0] + gamma * counts[0]
            for k in range(1, n_classes):
                v = unary[i, k] + gamma * counts[k]
                if v > mx:
                    mx = v
            tot = 0.0
            for k in range(n_classes):
                wk = exp(unary[i, k] + gamma * counts[k] - mx)
                w[k] = wk
                tot += wk
            u = uniforms[base + i] * tot
            cum = 0.0
            lab = n_classes - 1
            for k in range(n_classes):
                cum += w[k]
                if u < cum:
                    lab = k
                    break
            labels[i] = lab

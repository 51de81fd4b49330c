"""Independent oracles the solver modules are tested against.

Everything here deliberately avoids the code paths under test: the dense
symmetric-subspace Hamiltonian is assembled in the full 2^n space from
single-qubit flips and projected, eigen-decompositions go through
numpy/scipy LAPACK drivers, and closed-form quantities are summed by brute
force.
"""

import math

import numpy as np
import scipy.sparse
from scipy.linalg import eigh_tridiagonal


def dense_from_paulis(n, s, h_of_weight):
    """(n+1)x(n+1) matrix of the normalized interpolating Hamiltonian.

    Built element-by-element in the 2^n computational basis: the driver
    counts misaligned qubits via single-bit flips, the cost is diagonal in
    the Hamming weight.  The result is projected onto the normalized
    weight-k superpositions and shifted/scaled to match the normalized
    generator -sin(t) X - cos(t) Z + cos(t) (spike term).
    """
    dim = 1 << n
    rows, cols, data = [], [], []
    for z in range(dim):
        w = z.bit_count()
        rows.append(z)
        cols.append(z)
        data.append((1.0 - s) * n / 2.0 + s * h_of_weight(w))
        for i in range(n):
            rows.append(z)
            cols.append(z ^ (1 << i))
            data.append(-(1.0 - s) / 2.0)
    h_full = scipy.sparse.csr_matrix((data, (rows, cols)), shape=(dim, dim))

    proj = np.zeros((dim, n + 1))
    for z in range(dim):
        w = z.bit_count()
        proj[z, w] = 1.0 / math.sqrt(math.comb(n, w))
    h_sym = proj.T @ (h_full @ proj)
    r = math.hypot(s, 1.0 - s)
    return (h_sym - np.eye(n + 1) * n / 2.0) / r


def dense_eigh(op):
    """Full spectrum and vectors of a TridiagonalOperator via LAPACK."""
    return np.linalg.eigh(op.to_dense())


def lapack_tridiagonal_eigenpair(op, index):
    """One eigenpair from scipy's tridiagonal driver (inverse iteration)."""
    vals, vecs = eigh_tridiagonal(op.diag, op.offdiag, select="i",
                                  select_range=(index, index))
    return float(vals[0]), vecs[:, 0]


def two_by_two_eigenvalues(a, b, c):
    """Closed-form eigenvalues of [[a, c], [c, b]]."""
    mean = 0.5 * (a + b)
    rad = math.hypot(0.5 * (a - b), c)
    return mean - rad, mean + rad


def spikeless_ground_logamps(n):
    """log of sqrt(C(n,k)) (1/2)^k (sqrt(3)/2)^(n-k), the ground state at s*."""
    k = np.arange(n + 1, dtype=float)
    logc = np.array([math.lgamma(n + 1) - math.lgamma(x + 1) - math.lgamma(n - x + 1)
                     for x in k])
    return 0.5 * logc + k * math.log(0.5) + (n - k) * math.log(math.sqrt(3.0) / 2.0)


def brute_force_overlap_abs_ground(n):
    """Sum_k <k|psi_0> |<k|psi_1>| by direct log-domain summation."""
    lg = spikeless_ground_logamps(n)
    k = np.arange(n + 1, dtype=float)
    factor = np.abs(n - 4.0 * k) / math.sqrt(3.0 * n)
    with np.errstate(divide="ignore"):
        terms = 2.0 * lg + np.log(factor)
    finite = np.isfinite(terms)
    m = terms[finite].max()
    return math.exp(m) * np.sum(np.exp(terms[finite] - m))

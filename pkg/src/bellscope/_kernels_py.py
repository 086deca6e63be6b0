"""Pure-numpy versions of the compiled kernels (same signatures)."""
import numpy as np


def bell_value(U, lam, K):
    total = 0.0
    for i in range(2):
        Al = U[i] * lam
        for j in range(2):
            M = Al @ U[2 + j].T
            total += float(np.sum(K[i, j] * (M.real**2 + M.imag**2)))
    return total


def bell_value_grad(U, lam, K):
    d = lam.shape[0]
    E = np.zeros((4, d, d), dtype=complex)
    dlam = np.zeros(d)
    total = 0.0
    for i in range(2):
        A = U[i]
        for j in range(2):
            B = U[2 + j]
            M = (A * lam) @ B.T
            KM = K[i, j] * M
            total += float(np.sum(KM.real * M.real + KM.imag * M.imag))
            E[i] += 2.0 * (KM @ B.conj()) * lam
            E[2 + j] += 2.0 * (KM.T @ A.conj()) * lam
            dlam += 2.0 * np.sum((A * (KM.conj() @ B)).real, axis=0)
    return total, E, dlam


def givens_unitary(theta, phi, d):
    W = np.eye(d, dtype=complex)
    idx = 0
    for q in range(d - 1, 0, -1):
        for p in range(q):
            c, s = np.cos(theta[idx]), np.sin(theta[idx])
            e = np.exp(1j * phi[idx])
            rp, rq = W[p].copy(), W[q].copy()
            W[p] = e * c * rp - s * rq
            W[q] = e * s * rp + c * rq
            idx += 1
    return W

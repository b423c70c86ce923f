"""Pure numpy versions of the structure-constant kernels."""

import numpy as np


def ricci_operator(c):
    H = np.einsum("ajj->a", c)
    adH = np.einsum("i,ijk->kj", H, c)
    M = -0.5 * np.einsum("aij,bij->ab", c, c) + 0.25 * np.einsum("ija,ijb->ab", c, c)
    B = np.einsum("ajk,bkj->ab", c, c)
    ric = M - 0.5 * B - 0.5 * (adH + adH.T)
    return 0.5 * (ric + ric.T)


def act(h, hinv, c):
    t = np.tensordot(c, h, axes=([2], [1]))  # t[a,b,k]
    t = np.einsum("abk,bj->ajk", t, hinv)
    return np.ascontiguousarray(np.einsum("ajk,ai->ijk", t, hinv))


def jacobi_residual(c):
    # J[i,j,k,m] = sum_l c[i,j,l] c[l,k,m] + cyclic(i,j,k)
    cc = np.einsum("ijl,lkm->ijkm", c, c)
    J = cc + cc.transpose(1, 2, 0, 3) + cc.transpose(2, 0, 1, 3)
    return float(np.max(np.abs(J))) if J.size else 0.0


def scal_and_norm(c):
    ric = ricci_operator(c)
    return float(np.trace(ric)), float(np.sum(ric * ric))

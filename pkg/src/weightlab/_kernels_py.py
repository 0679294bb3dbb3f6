"""Pure-numpy versions of the set-basis kernels.

Same contracts as the compiled module; the only difference is that these take
the full :class:`~weightlab.kernels.CSR` (they need its point-to-set table).
Ties in :func:`scatter_max` resolve to the smallest set index, as in the
compiled code.
"""
import numpy as np


def set_sums(vals, mass, csr):
    weighted = vals[:, csr.indices] * mass[csr.indices]
    return np.add.reduceat(weighted, csr.indptr[:-1], axis=1)


def set_lp_norms(vals, mass, csr, recip):
    a = np.abs(vals[:, csr.indices])
    top = np.maximum.reduceat(a, csr.indptr[:-1], axis=1)
    if recip == 0.0:
        return top
    safe = np.where(top > 0, top, 1.0)
    scaled = (a / np.repeat(safe, csr.sizes, axis=1)) ** (1.0 / recip)
    acc = np.add.reduceat(scaled * mass[csr.indices], csr.indptr[:-1], axis=1)
    return np.where(top > 0, top * acc**recip, 0.0)


def scatter_max(setvals, csr):
    k = setvals.shape[0]
    padded = np.concatenate([setvals, np.full((k, 1), -np.inf)], axis=1)
    table = padded[:, csr.point_sets]
    arg = np.argmax(table, axis=2)
    out = np.take_along_axis(table, arg[..., None], axis=2)[..., 0]
    sets = csr.point_sets[np.arange(csr.n)[None, :], arg]
    sets = np.where(sets == csr.n_sets, -1, sets)
    return out, sets.astype(np.int64)


def scatter_add(setvals, csr):
    k = setvals.shape[0]
    padded = np.concatenate([setvals, np.zeros((k, 1))], axis=1)
    return padded[:, csr.point_sets].sum(axis=2)

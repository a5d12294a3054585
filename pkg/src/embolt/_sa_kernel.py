"""Numba inner loop for simulated annealing.

One "step" is a single random-site Metropolis proposal; the inverse
temperature ramps linearly from ~0 to its final value over t_max steps.  Each
chain carries its own xorshift64* generator so results do not depend on the
order chains are run in.
"""

import numpy as np
from numba import njit

_S12 = np.uint64(12)
_S25 = np.uint64(25)
_S27 = np.uint64(27)
_S11 = np.uint64(11)
_MUL = np.uint64(2685821657736338717)
_INV53 = 1.0 / 9007199254740992.0   # 2**-53


@njit(cache=True)
def run_chains(indptr, nbr, nbr_j, h, beta, t_max, free, fixed, seeds, out):
    """Anneal every chain and write its final configuration into out.

    indptr/nbr: CSR adjacency over vertex positions; nbr_j the coupling on
    each adjacency entry.  free lists the positions allowed to flip; fixed
    holds the frozen value (+/-1) elsewhere and is ignored on free positions.
    """
    n = h.shape[0]
    n_free = free.shape[0]
    n_chains = seeds.shape[0]
    for c in range(n_chains):
        x = seeds[c]
        z = out[c]
        for i in range(n):
            z[i] = fixed[i]
        for i in range(n_free):
            x ^= x >> _S12
            x ^= x << _S25
            x ^= x >> _S27
            u = ((x * _MUL) >> _S11) * _INV53
            z[free[i]] = 1 if u < 0.5 else -1
        if n_free == 0:
            continue
        for t in range(1, t_max + 1):
            bt = beta * t / t_max
            x ^= x >> _S12
            x ^= x << _S25
            x ^= x >> _S27
            u = ((x * _MUL) >> _S11) * _INV53
            s = free[int(u * n_free)] if u * n_free < n_free else free[n_free - 1]
            field = h[s]
            for e in range(indptr[s], indptr[s + 1]):
                field += nbr_j[e] * z[nbr[e]]
            d_e = 2.0 * z[s] * field
            if d_e <= 0.0:
                z[s] = -z[s]
            else:
                x ^= x >> _S12
                x ^= x << _S25
                x ^= x >> _S27
                u = ((x * _MUL) >> _S11) * _INV53
                if u < np.exp(-bt * d_e):
                    z[s] = -z[s]

"""Numpy fallback for the compiled statevector kernels (same semantics)."""
from __future__ import annotations

from collections import OrderedDict

import numpy as np

GENERAL, DIAGONAL, SUBSPACE_PHASE, FLIP = 0, 1, 2, 3

# Index arrays are cached per (width, fixed bits, control value); the cache is
# bounded in bytes so wide registers with long programs do not exhaust memory.
CACHE_BYTES = 256 * 2**20
_INDEX_CACHE: OrderedDict = OrderedDict()
_cache_used = 0


def _base_indices(nq: int, positions: tuple, cval: int) -> np.ndarray:
    global _cache_used
    key = (nq, positions, cval)
    idx = _INDEX_CACHE.get(key)
    if idx is not None:
        _INDEX_CACHE.move_to_end(key)
        return idx
    c = np.arange(1 << (nq - len(positions)), dtype=np.int64)
    for p in positions:
        lo = c & ((1 << p) - 1)
        c = ((c >> p) << (p + 1)) | lo
    idx = c | cval
    if idx.nbytes <= CACHE_BYTES:
        _INDEX_CACHE[key] = idx
        _cache_used += idx.nbytes
        while _cache_used > CACHE_BYTES:
            _, old = _INDEX_CACHE.popitem(last=False)
            _cache_used -= old.nbytes
    return idx


def run_program(psi, nq, gtype, target, cval, pos_off, pos, mats, repeats=1):
    gates = [(int(gtype[g]), tuple(int(v) for v in pos[pos_off[g]:pos_off[g + 1]]),
              int(cval[g]), 1 << int(target[g]), mats[g]) for g in range(len(gtype))]
    for _ in range(repeats):
        for t, positions, cv, bit, m in gates:
            i0 = _base_indices(nq, positions, cv)
            if t == SUBSPACE_PHASE:
                psi[i0] *= m[0]
                continue
            i1 = i0 | bit
            if t == DIAGONAL:
                psi[i0] *= m[0]
                psi[i1] *= m[3]
            elif t == FLIP:
                a0 = psi[i0]
                psi[i0] = psi[i1]
                psi[i1] = a0
            else:
                a0 = psi[i0]
                a1 = psi[i1]
                psi[i0] = m[0] * a0 + m[1] * a1
                psi[i1] = m[2] * a0 + m[3] * a1

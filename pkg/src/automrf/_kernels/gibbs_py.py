"""Pure-Python sweep kernel, bit-compatible with the compiled extension.

Both kernels perform the identical arithmetic in the identical order
(libm ``exp``, same max/sum/scan sequence), so a run produces the same
arrangements whichever backend is active.  Keep the two implementations
in lockstep; tests compare them site-for-site.
"""

from __future__ import annotations

from math import exp

import numpy as np


def run_sweeps(
    labels: np.ndarray,
    indptr: np.ndarray,
    indices: np.ndarray,
    unary: np.ndarray,
    gamma: float,
    order: np.ndarray,
    uniforms: np.ndarray,
    n_sweeps: int,
) -> None:
    """Apply ``n_sweeps`` single-site Gibbs sweeps to ``labels`` in place.

    Site i is visited in ``order`` position and resampled from its full
    conditional, consuming ``uniforms[t * n + i]`` on sweep t.
    """
    n = labels.shape[0]
    n_classes = unary.shape[1]
    for t in range(n_sweeps):
        base = t * n
        for oi in range(n):
            i = order[oi]
            counts = [0] * n_classes
            for e in range(indptr[i], indptr[i + 1]):
                counts[labels[indices[e]]] += 1
            row = unary[i]
            mx = row[0] + gamma * counts[0]
            for k in range(1, n_classes):
                v = row[k] + gamma * counts[k]
                if v > mx:
                    mx = v
            tot = 0.0
            w = [0.0] * n_classes
            for k in range(n_classes):
                wk = exp(row[k] + gamma * counts[k] - mx)
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

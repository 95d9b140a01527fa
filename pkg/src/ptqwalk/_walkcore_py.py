"""Pure numpy propagation kernel, used when the compiled extension is unavailable."""

import numpy as np


def propagate(amp, cos_t, sin_t, fac_l, fac_r, steps, record=True):
    """Apply ``steps`` full time steps to ``amp`` (shape ``(N, 2)``).

    Each substep applies the coin, the diagonal gain/phase factors and the
    conditional shift (L to ``j - 1``, R to ``j + 1`` on the ring).

    Returns
    -------
    amp : ndarray, shape (N, 2)
        Final amplitudes.
    dist : ndarray, shape (steps + 1, N) or None
        ``|psi_n(t)|^2`` for every recorded time, ``None`` when ``record`` is false.
    totals : ndarray, shape (steps + 1,)
        Total probability ``P(t)``.
    """
    left = np.array(amp[:, 0], dtype=np.complex128)
    right = np.array(amp[:, 1], dtype=np.complex128)
    isin = 1j * np.asarray(sin_t)
    dist = np.zeros((steps + 1, len(left))) if record else None
    totals = np.zeros(steps + 1)

    def probs():
        return left.real ** 2 + left.imag ** 2 + right.real ** 2 + right.imag ** 2

    p = probs()
    totals[0] = p.sum()
    if record:
        dist[0] = p
    for t in range(1, steps + 1):
        for i in (0, 1):
            c = cos_t[i]
            new_l = (c * left + isin[i] * right) * fac_l[i]
            new_r = (isin[i] * left + c * right) * fac_r[i]
            left = np.roll(new_l, -1)
            right = np.roll(new_r, 1)
        p = probs()
        totals[t] = p.sum()
        if record:
            dist[t] = p
    return np.stack([left, right], axis=1), dist, totals

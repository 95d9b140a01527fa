"""Built-in walk configurations.

``experiment``
    The optical-fibre loop walk: Hadamard-angle coins, alternating gain and
    loss ``e^{+-gamma0}`` and a period-4 phase pattern ``+-phi0`` on R movers.
``four-region``
    Coins that differ inside/outside ``|n| <= L/2`` and gain/phase fields that
    step at ``n = 0``; the second-substep fields are slaved to the first by the
    PT reflection about ``q = 0``.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import InvalidParameterError
from .operators import WalkConfig

EXPERIMENT_GAMMA0 = math.log(1.1)
EXPERIMENT_PHI0 = 6 * math.pi / 5


def experiment_config(n_sites: int = 64, gamma0: float = EXPERIMENT_GAMMA0,
                      phi0: float = EXPERIMENT_PHI0) -> WalkConfig:
    if n_sites % 4:
        raise InvalidParameterError(f"experiment ring must hold whole 4-site cells, got N={n_sites}")
    n = np.arange(n_sites) - n_sites // 2
    theta = np.full((2, n_sites), math.pi / 4)
    up, down = math.exp(gamma0), math.exp(-gamma0)
    gain_l = np.array([np.full(n_sites, up), np.full(n_sites, down)])
    gain_r = np.array([np.full(n_sites, down), np.full(n_sites, up)])
    # -phi0 where (n + 3) mod 4 is 1 or 2, +phi0 where it is 3 or 0
    pattern = np.where(np.isin((n + 3) % 4, (1, 2)), -phi0, phi0)
    return WalkConfig(
        n_sites,
        theta=theta,
        gain_l=gain_l,
        gain_r=gain_r,
        phi_l=np.zeros((2, n_sites)),
        phi_r=np.array([pattern, pattern]),
    )


def four_region_config(half_width: int = 128) -> WalkConfig:
    """Four-region walk on sites ``-L .. L-1`` (``L = half_width``).

    The gain and phase of the second substep follow from the first through
    ``x2_L(m) = x1_L(1 - m)`` and ``x2_R(m) = x1_R(-1 - m)`` (inverted for
    gains), with the reflected index wrapped onto the ring.
    """
    big_l = int(half_width)
    if big_l < 4 or big_l % 2:
        raise InvalidParameterError(f"L must be an even integer >= 4, got {half_width!r}")
    n_sites = 2 * big_l
    n = np.arange(n_sites) - big_l

    def wrap(m):
        return (m + big_l) % n_sites - big_l

    def step(m, negative, positive):
        return np.where(m <= -1, negative, positive)

    inner = np.abs(n) <= big_l // 2
    theta = np.array([
        np.where(inner, math.pi / 4, -math.pi / 8),
        np.where(inner, -math.pi / 3, math.pi / 6),
    ])
    refl_l, refl_r = wrap(1 - n), wrap(-1 - n)
    gain_l = np.array([step(n, 1.1, 1.2), 1 / step(refl_l, 1.1, 1.2)])
    gain_r = np.array([step(n, 1.2, 1.1), 1 / step(refl_r, 1.2, 1.1)])
    phi_l = np.array([step(n, math.pi / 4, math.pi / 8), step(refl_l, math.pi / 4, math.pi / 8)])
    phi_r = np.array([step(n, -math.pi / 3, -math.pi / 6), step(refl_r, -math.pi / 3, -math.pi / 6)])
    return WalkConfig(n_sites, theta=theta, gain_l=gain_l, gain_r=gain_r, phi_l=phi_l, phi_r=phi_r)


PRESETS = {
    "experiment": experiment_config,
    "four-region": four_region_config,
}

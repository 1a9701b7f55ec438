"""First-quantized wave functions extracted from kets, and two-body probes.

The wave function of a ket is its coordinate representation against the
product-of-creation bracket states; integrating out all but two coordinates
gives the two-body correlation (the ket itself is integrated, not a density,
so phases matter).  The antipodal profile evaluates it at (r, -r) with equal
spins, and its discrete Fourier transform on a ring exposes the selection
rule: relative angular components survive only where (-1)^l matches the
statistics grade.
"""

from __future__ import annotations

from itertools import product

import numpy as np

from .fockspace import StateVector, bracket_state
from .modes import Mode


def wavefunction(state: StateVector, coords) -> complex:
    """<xi_1 ... xi_N | state>: sigma-(anti)symmetric in the coordinates."""
    coords = tuple(coords)
    basis = state.basis
    if len(coords) != basis.n_particles:
        raise ValueError(
            f"{len(coords)} coordinates against an N={basis.n_particles} state"
        )
    return bracket_state(basis.space, coords, basis.sigma).dot(state)


def pair_correlation(state: StateVector, xi1: Mode, xi2: Mode) -> complex:
    """Sum the wave function over all coordinates after the first two.

    For N=2 this is the wave function itself; swapping the two arguments
    multiplies the result by the statistics grade.
    """
    basis = state.basis
    n = basis.n_particles
    if n < 2:
        raise ValueError("pair correlation needs at least two particles")
    space = basis.space
    weight = space.lattice.cell_volume ** (n - 2)
    total = 0j
    for rest in product(space.modes, repeat=n - 2):
        total += wavefunction(state, (xi1, xi2) + rest)
    return total * weight


def pair_distribution(state: StateVector, xi1: Mode, xi2: Mode) -> float:
    """Squared magnitude of the two-body correlation."""
    return abs(pair_correlation(state, xi1, xi2)) ** 2


def antipodal_profile(state: StateVector, twos_ms: int) -> np.ndarray:
    """r -> F((r, m_s), (-r, m_s)) over all sites; odd or even under r -> -r
    according to the statistics grade."""
    space = state.basis.space
    if not space.spin.is_allowed_projection(twos_ms):
        raise ValueError(f"projection 2m_s={twos_ms} not allowed")
    lattice = space.lattice
    out = np.zeros(lattice.n_sites, dtype=np.complex128)
    for site in range(lattice.n_sites):
        inv = lattice.invert_site(site)
        out[site] = pair_correlation(state, Mode(site, twos_ms), Mode(inv, twos_ms))
    return out


def relative_parity_spectrum(state: StateVector, twos_ms: int) -> np.ndarray:
    """DFT of the antipodal profile over the ring angle index.

    Components l with (-1)^l different from the statistics grade vanish,
    because the profile is sigma-symmetric under the half-ring shift.
    Defined on rings only; grids resolve parity through inversion alone.
    """
    space = state.basis.space
    if space.lattice.kind != "ring":
        raise ValueError("angular decomposition is defined on rings only")
    return np.fft.fft(antipodal_profile(state, twos_ms))

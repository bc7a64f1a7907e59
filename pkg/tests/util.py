"""Shared builders and independent hand-computed oracles for the tests."""

import cmath

import numpy as np

from gma.arrays import ArrayConfig, PathSet, wavelength_from_frequency

WAVELENGTH = wavelength_from_frequency(28e9)


def make_cfg(M=16, N=4, span_wavelengths=20.0, y_min=0.0, **kwargs):
    return ArrayConfig(M=M, N=N, wavelength=WAVELENGTH, y_min=y_min,
                       y_max=y_min + span_wavelengths * WAVELENGTH, **kwargs)


def random_paths(rng, L=2, equal_amplitude=False):
    aoas = rng.uniform(-np.pi / 2, np.pi / 2, L)
    phases = rng.uniform(0.0, 2.0 * np.pi, L)
    if equal_amplitude:
        gains = np.exp(1j * phases)
    else:
        gains = rng.uniform(0.2, 1.5, L) * np.exp(1j * phases)
    return PathSet(gains=gains, aoas=aoas)


def loop_channel(y, eta, paths, cfg):
    """Element-by-element, path-by-path channel accumulation in pure Python."""
    out = []
    for n in range(cfg.N):
        acc = 0j
        for gain, theta in zip(paths.gains, paths.aoas):
            shift = cmath.exp(1j * 2.0 * cmath.pi / cfg.wavelength
                              * y * cmath.sin(theta))
            element = cmath.exp(1j * 2.0 * cmath.pi * n * eta * cfg.d_bar
                                * cmath.sin(theta))
            acc += complex(gain) * shift * element
        out.append(acc)
    return np.array(out)


def g_highprec(y, b, aoas, wavelength):
    """Alignment term recomputed with 50-digit arithmetic.

    Central differences of g at small steps cancel catastrophically in
    float64; this oracle keeps the finite-difference checks at the stated
    step and tolerance.
    """
    import mpmath
    with mpmath.workdps(50):
        y = mpmath.mpf(y)
        total = mpmath.mpf(0)
        k0 = 2 * mpmath.pi / mpmath.mpf(wavelength)
        for bi, theta in zip(np.asarray(b), np.asarray(aoas)):
            total += abs(complex(bi)) * mpmath.cos(
                k0 * y * mpmath.sin(mpmath.mpf(theta))
                - mpmath.mpf(np.angle(bi)))
        return total


def fd_highprec(y, h, b, aoas, wavelength):
    """(first, second) central differences of g at step h, in high precision."""
    import mpmath
    with mpmath.workdps(50):
        h = mpmath.mpf(h)
        up = g_highprec(y + h, b, aoas, wavelength)
        mid = g_highprec(y, b, aoas, wavelength)
        dn = g_highprec(y - h, b, aoas, wavelength)
        return float((up - dn) / (2 * h)), float((up - 2 * mid + dn) / h ** 2)


def sherman_morrison_sinr(p1, h1, p2, h2):
    """SINR of user 1 under one rank-one interferer, by hand.

    gamma_1 = p1 * (||h1||^2 - p2*|h2^H h1|^2 / (1 + p2*||h2||^2)).
    """
    cross = np.vdot(h2, h1)
    return p1 * (np.vdot(h1, h1).real
                 - p2 * abs(cross) ** 2 / (1.0 + p2 * np.vdot(h2, h2).real))

"""Seeded Gaussian noise from a counter-based stream.

Uniforms come from the raw 64-bit output of Philox-4x64 keyed by the seed
(counter starting at zero): u = ((raw >> 11) + 0.5) / 2^53, never 0 or 1.
Consecutive pairs (u1, u2) become normals through Box-Muller,
sqrt(-2 ln u1) * (cos(2 pi u2), sin(2 pi u2)).
"""
import numpy as np

from primaldual.errors import ParameterError

_SCALE = 2.0 ** -53


def uniforms(seed, count):
    bits = np.random.Philox(key=int(seed)).random_raw(count)
    return ((bits >> np.uint64(11)).astype(float) + 0.5) * _SCALE


def standard_normals(seed, count):
    """``count`` standard normal draws for ``seed``."""
    if count < 0:
        raise ParameterError(f'count must be >= 0, got {count}')
    pairs = (count + 1) // 2
    u = uniforms(seed, 2 * pairs).reshape(pairs, 2)
    radius = np.sqrt(-2.0 * np.log(u[:, 0]))
    angle = 2.0 * np.pi * u[:, 1]
    return np.column_stack((radius * np.cos(angle), radius * np.sin(angle))).ravel()[:count]


def add_gaussian_noise(image, sigma, seed):
    """pixels + sigma * N(0, 1), clamped to [0, 1]."""
    if sigma < 0:
        raise ParameterError(f'sigma must be >= 0, got {sigma}')
    if sigma == 0:
        return image
    noisy = image.pixels + sigma * standard_normals(seed, image.pixels.size)
    return image.with_pixels(np.clip(noisy, 0.0, 1.0))

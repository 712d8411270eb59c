"""Beta-distribution kernel and seeded random streams for the review simulator."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy import special, stats

logger = logging.getLogger(__name__)

DEFAULT_HALFWIDTH = 0.1
_DENSITY_FLOOR = 1e-300
_MAX_SEED = 2 ** 64


class DomainError(ValueError):
    """Raised when an argument lies outside the domain of a kernel function."""


@dataclass(frozen=True)
class BetaParams:
    """Shape parameters of a beta distribution on [0, 1]."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0):
            raise DomainError(
                f"Beta shapes must be positive, got alpha={self.alpha}, beta={self.beta}"
            )

    def mean(self) -> float:
        return self.alpha / (self.alpha + self.beta)


class RngStream:
    """Single-owner random stream built on numpy's PCG64.

    A stream is identified by a master seed and a spawn key. ``derive``
    appends integers to the key, so ``RngStream(s).derive(r, k)`` always
    yields the same child stream for replicate ``r`` and purpose ``k``.
    """

    def __init__(self, seed: int, spawn_key: tuple = ()):
        seed = int(seed)
        if not 0 <= seed < _MAX_SEED:
            raise DomainError(f"Seed must be a 64-bit unsigned integer, got {seed}")
        self.seed = seed
        self.spawn_key = tuple(int(k) for k in spawn_key)
        sequence = np.random.SeedSequence(self.seed, spawn_key=self.spawn_key)
        self.generator = np.random.Generator(np.random.PCG64(sequence))

    def derive(self, *key: int) -> "RngStream":
        return RngStream(self.seed, self.spawn_key + tuple(key))

    def uniform(self, low: float = 0.0, high: float = 1.0) -> float:
        return float(self.generator.uniform(low, high))

    def uniforms(self, size: int) -> np.ndarray:
        return self.generator.uniform(0.0, 1.0, size)

    def beta(self, alpha: float, beta: float) -> float:
        return float(self.generator.beta(alpha, beta))

    def sample_without_replacement(self, items, k: int) -> list:
        """Draw ``k`` distinct items uniformly, in draw order."""
        items = list(items)
        picks = self.generator.choice(len(items), size=k, replace=False)
        return [items[i] for i in picks]

    def __repr__(self):
        return f"RngStream(seed={self.seed}, spawn_key={self.spawn_key})"


def _check_unit(x) -> None:
    arr = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
        raise DomainError(f"Argument must lie in [0, 1], got {x}")


def _check_halfwidth(halfwidth: float) -> None:
    if not 0.0 < halfwidth < 0.5:
        raise DomainError(f"Window halfwidth must lie in (0, 0.5), got {halfwidth}")


def beta_pdf(p: BetaParams, x: float) -> float:
    """Beta density B(alpha, beta, x)."""
    _check_unit(x)
    return float(stats.beta.pdf(x, p.alpha, p.beta))


def beta_cdf(p: BetaParams, x: float) -> float:
    """Regularized incomplete beta function I_x(alpha, beta)."""
    _check_unit(x)
    return float(special.betainc(p.alpha, p.beta, x))


def beta_sample(p: BetaParams, rng: RngStream) -> float:
    """One draw from Beta(alpha, beta) taken from ``rng``."""
    return rng.beta(p.alpha, p.beta)


def window_mass(alpha, beta, x, halfwidth: float = DEFAULT_HALFWIDTH):
    """
    Vectorized density mass in a circular window of width ``2 * halfwidth`` around ``x``.

    The window is clipped to [0, 1] and the clipped part is wrapped to the
    opposite end, so its total measure is always ``2 * halfwidth``:
    ``[x-h, 1] + [0, x+h-1]`` near 1 and ``[0, x+h] + [x+1-h, 1]`` near 0.
    When no wrapping is needed both wrap terms vanish (F(0) = 0, 1 - F(1) = 0).

    Args:
        alpha, beta: Shape parameters (scalars or arrays, broadcast together)
        x: Window centre(s) in [0, 1]
        halfwidth: Half the window width

    Returns:
        Array (or scalar) of masses in (0, 1]
    """
    x = np.asarray(x, dtype=float)
    upper = np.clip(x + halfwidth, 0.0, 1.0)
    lower = np.clip(x - halfwidth, 0.0, 1.0)
    wrap_high = np.clip(x + halfwidth - 1.0, 0.0, 1.0)
    wrap_low = np.clip(x - halfwidth + 1.0, 0.0, 1.0)

    mass = (
        special.betainc(alpha, beta, upper)
        - special.betainc(alpha, beta, lower)
        + special.betainc(alpha, beta, wrap_high)
        + (1.0 - special.betainc(alpha, beta, wrap_low))
    )
    return np.clip(mass, _DENSITY_FLOOR, 1.0)


def window_density(p: BetaParams, x: float, halfwidth: float = DEFAULT_HALFWIDTH) -> float:
    """Specialization measure z: beta mass in the wrapped window around ``x``."""
    _check_unit(x)
    _check_halfwidth(halfwidth)
    return float(window_mass(p.alpha, p.beta, x, halfwidth))


def window_support_measure(x: float, halfwidth: float = DEFAULT_HALFWIDTH) -> float:
    """Lebesgue measure of the wrapped window around ``x`` (always ``2 * halfwidth``)."""
    _check_unit(x)
    _check_halfwidth(halfwidth)
    return float(window_mass(1.0, 1.0, x, halfwidth))

"""Initial-data profiles used by the CLI and the test suite."""

from __future__ import annotations

import numpy as np

from .grid import Field, Grid

__all__ = ["sech_profile", "gaussian_profile", "random_localized"]


def sech_profile(grid: Grid, width: float = 1.0, center: float = 0.0) -> Field:
    """Unit-amplitude sech((x - center) / width)."""
    if not width > 0:
        raise ValueError("width must be positive")
    return Field(grid, (1.0 / np.cosh((grid.nodes - center) / width)).astype(complex))


def gaussian_profile(grid: Grid, width: float = 1.0, center: float = 0.0) -> Field:
    """Unit-amplitude exp(-((x - center) / width)^2)."""
    if not width > 0:
        raise ValueError("width must be positive")
    return Field(grid, np.exp(-(((grid.nodes - center) / width) ** 2)).astype(complex))


def random_localized(
    grid: Grid, seed: int, modes: int = 8, envelope_width: float | None = None
) -> Field:
    """Band-limited random field under a Gaussian envelope, peak-normalized.

    Deterministic for a fixed seed; used for randomized property checks.
    """
    rng = np.random.default_rng(seed)
    coeffs = np.zeros(grid.n, dtype=complex)
    idx = np.concatenate([np.arange(0, modes + 1), np.arange(grid.n - modes, grid.n)])
    coeffs[idx] = rng.standard_normal(idx.size) + 1j * rng.standard_normal(idx.size)
    raw = np.fft.ifft(coeffs)
    width = envelope_width if envelope_width is not None else grid.length / 8.0
    raw *= np.exp(-((grid.nodes / width) ** 2))
    raw /= np.max(np.abs(raw))
    return Field(grid, raw)

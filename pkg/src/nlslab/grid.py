"""
Periodic spatial grid, complex fields, quadrature and the two bilinear forms.

The phase space is the set of complex-valued functions sampled on a uniform
periodic grid over x in [-L/2, L/2), viewed as a real vector space.  The
real inner product is ``inner(u, v) = Re int u conj(v) dx`` and the symplectic
form is ``omega(u, v) = inner(u, i v) = Im int u conj(v) dx``.  Both are
evaluated with the rectangle rule, which is spectrally accurate for smooth
periodic integrands.

All results downstream assume fields with negligible mass near the boundary;
moments raise :class:`BoundaryMassWarning` when that assumption fails.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "BoundaryMassWarning",
    "Grid",
    "Field",
    "ExtTangent",
    "make_grid",
    "quadrature",
    "spectral_derivative",
    "inner",
    "omega",
    "moment",
    "boundary_mass_fraction",
    "write_field_csv",
    "read_field_csv",
]

# Fraction of the domain (total, split between both ends) treated as the
# boundary region for localization checks, and the admissible mass fraction.
BOUNDARY_REGION = 0.10
BOUNDARY_MASS_TOL = 1e-6


class BoundaryMassWarning(UserWarning):
    """Field carries non-negligible mass in the outer region of the box."""


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class Grid:
    """Uniform periodic grid on [-length/2, length/2) with FFT wavenumbers.

    Attributes
    ----------
    n : number of points, a power of two, at least 16.
    length : box size L; the domain is periodic with period L.
    dx : spacing L/n.
    nodes : grid points -L/2 + j*dx.
    wavenumbers : 2*pi*j/L in FFT order (contains 0 once; closed under
        negation except for the single Nyquist mode).
    """

    n: int
    length: float
    dx: float
    nodes: np.ndarray
    wavenumbers: np.ndarray

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Grid):
            return NotImplemented
        return self.n == other.n and self.length == other.length

    def __hash__(self) -> int:
        return hash((self.n, self.length))

    def __repr__(self) -> str:  # arrays are noise in test output
        return f"Grid(n={self.n}, length={self.length})"


def make_grid(n: int, length: float) -> Grid:
    """Build a periodic grid with ``n`` points (power of two, >= 16)."""
    if not isinstance(n, (int, np.integer)) or n < 16 or (n & (n - 1)) != 0:
        raise ValueError(f"grid size must be a power of two >= 16, got {n!r}")
    if not length > 0:
        raise ValueError(f"grid length must be positive, got {length!r}")
    length = float(length)
    dx = length / n
    nodes = -length / 2 + dx * np.arange(n)
    wavenumbers = 2.0 * np.pi * np.fft.fftfreq(n, d=dx)
    return Grid(int(n), length, dx, _readonly(nodes), _readonly(wavenumbers))


@dataclass(frozen=True, eq=False)
class Field:
    """A complex field sampled on a :class:`Grid`.  Immutable and finite."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=complex)
        if values.shape != (self.grid.n,):
            raise ValueError(
                f"field has {values.shape} values for a grid of {self.grid.n} points"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("field values must be finite")
        object.__setattr__(self, "values", _readonly(values))

    # Linear-space arithmetic; enough for u + eps*v style expressions.
    def __add__(self, other: "Field") -> "Field":
        _check_same_grid(self, other)
        return Field(self.grid, self.values + other.values)

    def __sub__(self, other: "Field") -> "Field":
        _check_same_grid(self, other)
        return Field(self.grid, self.values - other.values)

    def __mul__(self, c: complex) -> "Field":
        return Field(self.grid, self.values * c)

    __rmul__ = __mul__

    def __neg__(self) -> "Field":
        return Field(self.grid, -self.values)

    def norm(self) -> float:
        """L2 norm sqrt(int |u|^2 dx)."""
        return float(np.sqrt(inner(self, self)))


@dataclass(frozen=True)
class ExtTangent:
    """Tangent vector (v, T) to the extended space (field, time)."""

    v: Field
    t_component: float

    def __post_init__(self) -> None:
        if not np.isfinite(self.t_component):
            raise ValueError("t_component must be finite")

    def norm(self) -> float:
        return float(np.sqrt(inner(self.v, self.v) + self.t_component**2))


def _check_same_grid(u: Field, v: Field) -> None:
    if u.grid is not v.grid and u.grid != v.grid:
        raise ValueError(f"grid mismatch: {u.grid} vs {v.grid}")


def quadrature(grid: Grid, f: np.ndarray) -> float:
    """Rectangle-rule integral dx * sum(f) of a real-valued sample array."""
    f = np.asarray(f)
    if f.shape != (grid.n,):
        raise ValueError(f"array of shape {f.shape} on a grid of {grid.n} points")
    return float(grid.dx * np.sum(f))


def _l2_pairing(u: Field, v: Field) -> complex:
    """Discrete int u conj(v) dx."""
    _check_same_grid(u, v)
    # vdot conjugates its first argument: sum(conj(v) * u) = sum(u * conj(v))
    return complex(u.grid.dx * np.vdot(v.values, u.values))


def inner(u: Field, v: Field) -> float:
    """Real inner product Re int u conj(v) dx."""
    return _l2_pairing(u, v).real


def omega(u: Field, v: Field) -> float:
    """Symplectic form Im int u conj(v) dx = inner(u, i v)."""
    return _l2_pairing(u, v).imag


def spectral_derivative(u: Field, order: int) -> Field:
    """Fourier derivative of order 1 or 2.

    Multiplies the spectrum by (i k)^order; the Nyquist mode of the odd-order
    derivative is zeroed (its sign is ambiguous on the real sampling lattice).
    """
    if order not in (1, 2):
        raise ValueError(f"derivative order must be 1 or 2, got {order!r}")
    k = u.grid.wavenumbers
    uhat = np.fft.fft(u.values)
    if order == 1:
        mult = 1j * k.astype(complex)
        mult[u.grid.n // 2] = 0.0
    else:
        mult = -(k**2)
    return Field(u.grid, np.fft.ifft(mult * uhat))


def boundary_mass_fraction(u: Field) -> float:
    """Fraction of int |u|^2 carried by the outer 10% of the box."""
    density = np.abs(u.values) ** 2
    total = np.sum(density)
    if total == 0.0:
        return 0.0
    edge = 0.5 * (1.0 - BOUNDARY_REGION) * u.grid.length
    outer = np.sum(density[np.abs(u.grid.nodes) >= edge])
    return float(outer / total)


def moment(u: Field, order: int) -> float:
    """Spatial moment int x^order |u|^2 dx on the canonical branch of x.

    Warns with :class:`BoundaryMassWarning` when the field is not localized
    well inside the box (the moment is then contaminated by the periodic
    seam and should not be trusted).
    """
    if order not in (1, 2):
        raise ValueError(f"moment order must be 1 or 2, got {order!r}")
    frac = boundary_mass_fraction(u)
    if frac > BOUNDARY_MASS_TOL:
        warnings.warn(
            f"boundary mass fraction {frac:.3e} exceeds {BOUNDARY_MASS_TOL:.0e}; "
            f"x-moments are unreliable near the periodic seam",
            BoundaryMassWarning,
            stacklevel=2,
        )
    x = u.grid.nodes
    return quadrature(u.grid, (x**order) * np.abs(u.values) ** 2)


# ---------------------------------------------------------------------------
# CSV serialization: columns x, re, im at full precision.

def write_field_csv(u: Field, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "re", "im"])
        for x, val in zip(u.grid.nodes, u.values):
            writer.writerow([f"{x:.17g}", f"{val.real:.17g}", f"{val.imag:.17g}"])


def read_field_csv(path) -> Field:
    """Read a field written by :func:`write_field_csv`, rebuilding its grid."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0][:3] != ["x", "re", "im"]:
        raise ValueError(f"{path}: expected header 'x,re,im'")
    data = np.array([[float(c) for c in row] for row in rows[1:]])
    if data.ndim != 2 or data.shape[0] < 2:
        raise ValueError(f"{path}: no field samples")
    n = data.shape[0]
    dx = data[1, 0] - data[0, 0]
    grid = make_grid(n, n * dx)
    if not np.allclose(grid.nodes, data[:, 0], rtol=0, atol=1e-12 * grid.length):
        raise ValueError(f"{path}: x column is not a uniform grid over [-L/2, L/2)")
    return Field(grid, data[:, 1] + 1j * data[:, 2])

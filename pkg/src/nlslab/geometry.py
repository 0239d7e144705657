"""
Hamiltonian, one-form, presymplectic two-form, Lagrangian and action.

The energy functional on the discretized phase space is

    H(u) = int ( 1/4 |u_x|^2 - 1/(p+1) |u|^(p+1) ) dx,     p > 1,

whose gradient with respect to the real inner product is
``grad H = -1/2 u_xx - |u|^(p-1) u`` and whose Hamiltonian vector field is
``Xi_H = (1/i) grad H``, defined through ``omega(v, Xi_H) = dH(v)``.

On the extended space of pairs (field, time) we use the one-form

    alpha_(u,t)(v, T) = 1/2 omega(u, v) - H(u) T,

its exterior derivative

    omega_ext((v1,T1),(v2,T2)) = omega(v1,v2) - dH(v1) T2 + dH(v2) T1,

the Lagrangian L(u, udot) = alpha(udot, 1), and the action as the time
integral of L along a stored trajectory.  ``(Xi_H, 1)`` spans the kernel of
omega_ext, which is the geometric statement that the flow solves the PDE;
``kernel_residual`` measures that numerically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import ExtTangent, Field, inner, omega, quadrature, spectral_derivative

__all__ = [
    "Trajectory",
    "validate_power",
    "hamiltonian",
    "grad_h",
    "hamiltonian_vf",
    "alpha",
    "omega_ext",
    "kernel_residual",
    "lagrangian",
    "action",
    "first_variation",
    "time_derivatives",
]


def validate_power(p: float) -> float:
    """Nonlinearity exponent for |u|^(p-1) u; must exceed 1."""
    p = float(p)
    if not np.isfinite(p) or p <= 1.0:
        raise ValueError(f"nonlinearity power must be > 1, got {p!r}")
    return p


def _density_power(u: Field, q: float) -> np.ndarray:
    # |u|^q computed as (|u|^2)^(q/2): no branch trouble at u = 0 for
    # non-integer q.
    return np.abs(u.values) ** 2 if q == 2.0 else (np.abs(u.values) ** 2) ** (q / 2.0)


def hamiltonian(u: Field, p: float) -> float:
    """Energy H(u); kinetic term in spectral space, potential pointwise."""
    p = validate_power(p)
    grid = u.grid
    uhat = np.fft.fft(u.values)
    # Parseval: int |u_x|^2 dx = (dx/n) sum k^2 |uhat|^2, multiplier matching
    # the order-2 spectral derivative.
    kinetic = 0.25 * grid.dx / grid.n * float(np.sum(grid.wavenumbers**2 * np.abs(uhat) ** 2))
    potential = -quadrature(grid, _density_power(u, p + 1.0)) / (p + 1.0)
    return kinetic + potential


def grad_h(u: Field, p: float) -> Field:
    """Gradient of H in the real inner product: -1/2 u_xx - |u|^(p-1) u."""
    p = validate_power(p)
    uxx = spectral_derivative(u, 2)
    return Field(u.grid, -0.5 * uxx.values - _density_power(u, p - 1.0) * u.values)


def hamiltonian_vf(u: Field, p: float) -> Field:
    """Hamiltonian vector field Xi_H = (1/i) grad H = -i grad H."""
    return Field(u.grid, -1j * grad_h(u, p).values)


def alpha(u: Field, t: float, xt: ExtTangent, p: float) -> float:
    """One-form alpha_(u,t)(v, T) = 1/2 omega(u, v) - H(u) T."""
    return 0.5 * omega(u, xt.v) - hamiltonian(u, p) * xt.t_component


def omega_ext(u: Field, p: float, a: ExtTangent, b: ExtTangent) -> float:
    """Exterior derivative of alpha, evaluated on two extended tangents.

    Antisymmetric by construction; reduces to omega(v1, v2) when both time
    components vanish.
    """
    g = grad_h(u, p)
    return (
        omega(a.v, b.v)
        - inner(g, a.v) * b.t_component
        + inner(g, b.v) * a.t_component
    )


def kernel_residual(u: Field, p: float, n_samples: int, seed: int = 0) -> float:
    """Witness that (Xi_H(u), 1) lies in the kernel of omega_ext.

    Returns the max over ``n_samples`` random unit extended tangents (v, T)
    of |omega_ext((Xi_H, 1), (v, T))| normalized by both norms.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    xi = ExtTangent(hamiltonian_vf(u, p), 1.0)
    xi_norm = xi.norm()
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_samples):
        raw = rng.standard_normal(u.grid.n) + 1j * rng.standard_normal(u.grid.n)
        vt = ExtTangent(Field(u.grid, raw), float(rng.standard_normal()))
        worst = max(worst, abs(omega_ext(u, p, xi, vt)) / (xi_norm * vt.norm()))
    return worst


def lagrangian(u: Field, udot: Field, p: float) -> float:
    """L(u, udot) = 1/2 omega(u, udot) - H(u) = alpha(u, t, (udot, 1), p)."""
    return 0.5 * omega(u, udot) - hamiltonian(u, p)


@dataclass(frozen=True)
class Trajectory:
    """A sampled curve t -> u(t) with the nonlinearity power it evolved under."""

    times: np.ndarray
    states: tuple[Field, ...]
    p: float

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=float)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "states", tuple(self.states))
        if times.ndim != 1 or len(times) != len(self.states):
            raise ValueError("times and states must have equal length")
        if len(times) >= 2 and not np.all(np.diff(times) > 0):
            raise ValueError("times must be strictly increasing")
        validate_power(self.p)
        grid = self.states[0].grid if self.states else None
        for s in self.states:
            if s.grid != grid:
                raise ValueError("all states must share one grid")

    def __len__(self) -> int:
        return len(self.states)

    @property
    def grid(self):
        return self.states[0].grid


def time_derivatives(traj: Trajectory) -> list[Field]:
    """Centered differences in t (one-sided at the endpoints)."""
    t, s = traj.times, traj.states
    n = len(s)
    if n < 2:
        raise ValueError("need at least 2 states to differentiate")
    out: list[Field] = []
    for i in range(n):
        if i == 0:
            du = (s[1].values - s[0].values) / (t[1] - t[0])
        elif i == n - 1:
            du = (s[-1].values - s[-2].values) / (t[-1] - t[-2])
        else:
            du = (s[i + 1].values - s[i - 1].values) / (t[i + 1] - t[i - 1])
        out.append(Field(traj.grid, du))
    return out


def action(traj: Trajectory) -> float:
    """Trapezoidal time integral of the Lagrangian along the trajectory.

    The time derivative is taken from the stored states, so the action is
    defined for arbitrary curves, not only solutions of the flow.
    """
    if len(traj) < 3:
        raise ValueError("action needs a trajectory with at least 3 states")
    dots = time_derivatives(traj)
    lag = np.array([lagrangian(u, du, traj.p) for u, du in zip(traj.states, dots)])
    return float(np.trapezoid(lag, traj.times))


def _perturbed(traj: Trajectory, pert: list[Field], eps: float) -> Trajectory:
    states = [u + eps * d for u, d in zip(traj.states, pert)]
    return Trajectory(traj.times, states, traj.p)


def first_variation(traj: Trajectory, pert: list[Field], eps: float) -> float:
    """Centered difference (S(traj + eps pert) - S(traj - eps pert)) / (2 eps).

    The perturbation must vanish at both endpoints of the time interval.
    For a trajectory solving the flow the result is O(eps^2); for a
    non-solution it converges to the (nonzero) first variation.
    """
    if len(pert) != len(traj):
        raise ValueError("perturbation must have one field per trajectory state")
    for idx in (0, -1):
        if np.max(np.abs(pert[idx].values)) != 0.0:
            raise ValueError("perturbation must vanish at both endpoints")
    s_plus = action(_perturbed(traj, pert, eps))
    s_minus = action(_perturbed(traj, pert, -eps))
    return (s_plus - s_minus) / (2.0 * eps)

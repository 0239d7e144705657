"""
Effective dynamics on an ansatz manifold, with comparison against the PDE.

Restricting the Lagrangian L = 1/2 omega(u, u_dot) - H(u) to a parametrized
family u(theta) gives

    L(theta, theta_dot) = 1/2 sum_j theta_dot_j omega(u, du/dtheta_j) - H(theta),

whose Euler-Lagrange equations reduce to the skew-gradient system

    Omega(theta) theta_dot = grad_theta H(theta),

with Omega the restricted symplectic Gram matrix (derivation in the README).
The system is integrated with classical RK4.  Where Omega degenerates the
reduction itself fails; that is surfaced as :class:`DegenerateOmegaError`
carrying the kernel direction, never hidden by regularization.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .charges import mass, momentum
from .geometry import Trajectory
from .grid import Field, moment
from .presymplectic import (
    AnsatzManifold,
    omega_matrix,
    pullback_energy_gradient,
    pullback_hamiltonian,
)
from .propagate import StepConfig, evaluate_at, evolve

__all__ = [
    "EffectiveState",
    "DegenerateOmegaError",
    "DomainExitError",
    "ComparisonReport",
    "effective_hamiltonian",
    "effective_rhs",
    "integrate_effective",
    "field_observables",
    "compare_with_pde",
    "CONDITION_LIMIT",
]

CONDITION_LIMIT = 1e8


@dataclass(frozen=True)
class EffectiveState:
    """A point of the reduced flow: parameters, time, conditioning of Omega."""

    theta: np.ndarray
    time: float
    omega_condition: float


class DegenerateOmegaError(RuntimeError):
    """The restricted form is (numerically) degenerate at theta.

    Carries the offending parameters, the condition number, the kernel
    direction of Omega, and any states integrated before the halt.
    """

    def __init__(
        self,
        theta: np.ndarray,
        condition: float,
        kernel_direction: np.ndarray,
        states: list[EffectiveState] | None = None,
    ):
        super().__init__(
            f"restricted symplectic form is degenerate (condition {condition:.3e}) "
            f"at theta = {np.array2string(theta, precision=6)}"
        )
        self.theta = theta
        self.condition = condition
        self.kernel_direction = kernel_direction
        self.states = states or []


class DomainExitError(RuntimeError):
    """The reduced flow left the manifold's parameter box."""

    def __init__(self, theta: np.ndarray, states: list[EffectiveState]):
        super().__init__(
            f"effective trajectory left the parameter domain at "
            f"theta = {np.array2string(theta, precision=6)}"
        )
        self.theta = theta
        self.states = states


def effective_hamiltonian(m: AnsatzManifold, theta: np.ndarray, p: float) -> float:
    """Energy of the embedded point H(u(theta))."""
    m.check_domain(np.asarray(theta, dtype=float))
    return pullback_hamiltonian(m, theta, p)


def _rhs_and_condition(
    m: AnsatzManifold, theta: np.ndarray, p: float
) -> tuple[np.ndarray, float]:
    om = omega_matrix(m, theta).entries
    sv = np.linalg.svd(om, compute_uv=False)
    condition = float(sv[0] / sv[-1]) if sv[-1] > 0 else np.inf
    if condition >= CONDITION_LIMIT:
        _, _, vt = np.linalg.svd(om)
        raise DegenerateOmegaError(np.asarray(theta, float), condition, vt[-1])
    grad = pullback_energy_gradient(m, theta, p)
    theta_dot = np.linalg.solve(om, grad)
    return theta_dot, condition


def effective_rhs(m: AnsatzManifold, theta: np.ndarray, p: float) -> np.ndarray:
    """theta_dot solving Omega(theta) theta_dot = grad_theta H(theta)."""
    theta = np.asarray(theta, dtype=float)
    m.check_domain(theta)
    rhs, _ = _rhs_and_condition(m, theta, p)
    return rhs


def integrate_effective(
    m: AnsatzManifold, theta0: np.ndarray, p: float, dt: float, t_final: float
) -> list[EffectiveState]:
    """Classical RK4 integration of the reduced flow.

    Raises :class:`DegenerateOmegaError` or :class:`DomainExitError` with the
    partial trajectory attached when the flow hits a degeneracy of Omega or
    leaves the parameter box.
    """
    if not dt > 0 or not t_final >= dt:
        raise ValueError("need dt > 0 and t_final >= dt")
    theta = np.asarray(theta0, dtype=float).copy()
    n_steps = int(round(t_final / dt))
    states: list[EffectiveState] = []

    def rhs(th: np.ndarray) -> np.ndarray:
        try:
            m.check_domain(th)
        except ValueError as err:
            raise DomainExitError(th, states) from err
        try:
            return _rhs_and_condition(m, th, p)[0]
        except DegenerateOmegaError as err:
            err.states = states
            raise

    for step in range(n_steps + 1):
        t = step * dt
        try:
            _, condition = _rhs_and_condition(m, theta, p)
        except DegenerateOmegaError as err:
            err.states = states
            raise
        states.append(EffectiveState(theta.copy(), t, condition))
        if step == n_steps:
            break
        k1 = rhs(theta)
        k2 = rhs(theta + 0.5 * dt * k1)
        k3 = rhs(theta + 0.5 * dt * k2)
        k4 = rhs(theta + dt * k3)
        theta = theta + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    return states


# ---------------------------------------------------------------------------
# Comparison against the full PDE


def field_observables(u: Field) -> dict[str, float]:
    """Mass, centroid, momentum and the phase at the centroid of a field."""
    m_val = mass(u)
    q = moment(u, 1) / m_val if m_val > 0 else 0.0
    phase = float(np.angle(evaluate_at(u, np.array([q]))[0]))
    return {"mass": m_val, "centroid": q, "momentum": momentum(u), "phase": phase}


def _wrap_angle(delta: float) -> float:
    return (delta + np.pi) % (2.0 * np.pi) - np.pi


@dataclass(frozen=True)
class ComparisonReport:
    """Observables of the PDE run vs the ansatz prediction along it."""

    times: np.ndarray
    pde: dict[str, np.ndarray]
    ansatz: dict[str, np.ndarray]
    deviations: dict[str, np.ndarray]
    max_deviation: dict[str, float]
    pde_trajectory: Trajectory
    effective_states: list[EffectiveState]


def compare_with_pde(
    m: AnsatzManifold,
    theta0: np.ndarray,
    p: float,
    cfg: StepConfig,
    initial: Field | None = None,
) -> ComparisonReport:
    """Evolve the embedded initial data and the reduced system side by side.

    Both runs share the step size; observables (mass, centroid, momentum,
    centroid phase) are extracted from the PDE snapshots and from the
    embedded ansatz fields at matching times.  ``initial`` overrides the PDE
    initial data (e.g. to perturb it off the manifold).
    """
    theta0 = np.asarray(theta0, dtype=float)
    traj = evolve(initial if initial is not None else m.field(theta0), p, cfg)
    eff = integrate_effective(m, theta0, p, cfg.dt, cfg.t_final)
    eff_by_step = {round(s.time / cfg.dt): s for s in eff}

    names = ("mass", "centroid", "momentum", "phase")
    pde: dict[str, list[float]] = {n: [] for n in names}
    ansatz: dict[str, list[float]] = {n: [] for n in names}
    for t, state in zip(traj.times, traj.states):
        eff_state = eff_by_step[round(t / cfg.dt)]
        obs_pde = field_observables(state)
        obs_ans = field_observables(m.field(eff_state.theta))
        for n in names:
            pde[n].append(obs_pde[n])
            ansatz[n].append(obs_ans[n])

    pde_arr = {n: np.array(v) for n, v in pde.items()}
    ans_arr = {n: np.array(v) for n, v in ansatz.items()}
    dev = {}
    for n in names:
        raw = pde_arr[n] - ans_arr[n]
        if n == "phase":
            raw = np.array([_wrap_angle(d) for d in raw])
        dev[n] = np.abs(raw)
    return ComparisonReport(
        times=traj.times,
        pde=pde_arr,
        ansatz=ans_arr,
        deviations=dev,
        max_deviation={n: float(np.max(dev[n])) for n in names},
        pde_trajectory=traj,
        effective_states=eff,
    )

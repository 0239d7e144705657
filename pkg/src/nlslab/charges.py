"""
Conserved charges of the flow and their drift along trajectories.

Every charge is the one-form alpha evaluated on a symmetry generator,
``noether_from_generator``.  The closed forms below follow the usual
normalization (mass int |u|^2, momentum Im int u_x conj(u), energy H); for
the phase, translation and Galilean generators the generic formula returns
exactly half of these, because alpha carries omega with a factor 1/2.  The
constant per charge is fixed and recorded in ``GENERATOR_CLOSED_FORM_RATIO``.

The dilation charge (``virial_charge``) and the Moebius-rotation charge
(``pseudoconformal_charge``) are conserved only at the mass-critical power
p = 5; evaluating them elsewhere warns.  The virial identities,

    d/dt ( Im int x u_x conj(u) ) = 4 H(u),
    int x^2 |u|^2 (t) = V(0) + 2 t Im int x conj(u) u_x |_(t=0) + 4 H t^2,

are exposed through ``virial_residual_1`` and ``variance_parabola``; the
plus sign on the quadratic coefficient is the measured one and is frozen in
the regression tests.

Charges are always evaluated on recorded snapshots, never inside the
stepper, so their definitions cannot perturb the dynamics.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .geometry import Trajectory, hamiltonian
from .grid import ExtTangent, Field, moment, spectral_derivative
from .geometry import alpha as _alpha

__all__ = [
    "NonConservedChargeWarning",
    "ChargeSpec",
    "DriftRow",
    "mass",
    "momentum",
    "energy",
    "variance",
    "xp_moment",
    "galilean_charge",
    "virial_charge",
    "pseudoconformal_charge",
    "noether_from_generator",
    "standard_charges",
    "charge_series",
    "drift_report",
    "virial_residual_1",
    "variance_parabola",
    "GENERATOR_CLOSED_FORM_RATIO",
]

# closed form = ratio * generic Noether value, per generator kind
GENERATOR_CLOSED_FORM_RATIO = {
    "phase": 2.0,
    "translation": 2.0,
    "time_shift": 1.0,
    "galilean": 2.0,
    "scaling": 1.0,
    "sl2": 1.0,
}


class NonConservedChargeWarning(UserWarning):
    """Charge evaluated at a nonlinearity power where it is not conserved."""


def mass(u: Field) -> float:
    """int |u|^2 dx."""
    return float(u.grid.dx * np.sum(np.abs(u.values) ** 2))


def momentum(u: Field) -> float:
    """Im int u_x conj(u) dx, with a spectral derivative."""
    ux = spectral_derivative(u, 1)
    return float((u.grid.dx * np.vdot(u.values, ux.values)).imag)


def energy(u: Field, p: float) -> float:
    """Alias for the Hamiltonian, as a conserved charge."""
    return hamiltonian(u, p)


def variance(u: Field) -> float:
    """Second spatial moment int x^2 |u|^2 dx."""
    return moment(u, 2)


def xp_moment(u: Field) -> float:
    """Im int x u_x conj(u) dx, the position-momentum correlation."""
    ux = spectral_derivative(u, 1)
    integrand = u.grid.nodes * ux.values * np.conj(u.values)
    return float((u.grid.dx * np.sum(integrand)).imag)


def galilean_charge(u: Field, t: float) -> float:
    """t * momentum - int x |u|^2; constant because the centroid moves freely."""
    return t * momentum(u) - moment(u, 1)


def _warn_unless_quintic(p: float, name: str) -> None:
    if p != 5.0:
        warnings.warn(
            f"{name} is conserved only at p = 5 (got p = {p:g})",
            NonConservedChargeWarning,
            stacklevel=3,
        )


def virial_charge(u: Field, t: float, p: float = 5.0) -> float:
    """-1/2 Im int x u_x conj(u) + 2 t H(u); conserved at p = 5 only."""
    _warn_unless_quintic(p, "virial_charge")
    return -0.5 * xp_moment(u) + 2.0 * t * hamiltonian(u, p)


def pseudoconformal_charge(u: Field, t: float, p: float = 5.0) -> float:
    """-1/4 int x^2 |u|^2 + t/2 Im int x u_x conj(u) - H t^2 - H; p = 5 only."""
    _warn_unless_quintic(p, "pseudoconformal_charge")
    h = hamiltonian(u, p)
    return -0.25 * variance(u) + 0.5 * t * xp_moment(u) - h * t**2 - h


def noether_from_generator(u: Field, t: float, gen: ExtTangent, p: float) -> float:
    """Generic charge alpha_(u,t)(generator); agrees with each closed form
    up to the fixed ratio in GENERATOR_CLOSED_FORM_RATIO."""
    return _alpha(u, t, gen, p)


# ---------------------------------------------------------------------------
# Charge registry and drift monitoring


@dataclass(frozen=True)
class ChargeSpec:
    """A named charge: closed-form evaluator plus drift-normalization scale.

    ``requires_p`` restricts drift monitoring to trajectories of that power;
    ``time_dependent`` marks charges that read the snapshot time.
    """

    name: str
    generator_kind: str
    closed_form: str
    requires_p: float | None = None
    time_dependent: bool = False

    def evaluate(self, u: Field, t: float, p: float) -> float:
        if self.closed_form == "mass":
            return mass(u)
        if self.closed_form == "momentum":
            return momentum(u)
        if self.closed_form == "energy":
            return energy(u, p)
        if self.closed_form == "galilean":
            return galilean_charge(u, t)
        if self.closed_form == "virial":
            return virial_charge(u, t, p)
        if self.closed_form == "pseudoconformal":
            return pseudoconformal_charge(u, t, p)
        raise ValueError(f"unknown closed form {self.closed_form!r}")

    def scale(self, u: Field, t: float, p: float) -> float:
        """Magnitude against which drift is measured.

        For charges built from several terms (Galilean, virial,
        pseudoconformal) the natural scale is the sum of the term magnitudes:
        the charge itself may be exactly zero along the whole run.
        """
        if self.closed_form == "galilean":
            return abs(t * momentum(u)) + abs(moment(u, 1))
        if self.closed_form == "virial":
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", NonConservedChargeWarning)
                return 0.5 * abs(xp_moment(u)) + abs(2.0 * t * hamiltonian(u, p))
        if self.closed_form == "pseudoconformal":
            h = hamiltonian(u, p)
            return (
                0.25 * variance(u)
                + 0.5 * abs(t * xp_moment(u))
                + abs(h) * (1.0 + t**2)
            )
        return abs(self.evaluate(u, t, p))


STANDARD_CHARGES = {
    "mass": ChargeSpec("mass", "phase", "mass"),
    "momentum": ChargeSpec("momentum", "translation", "momentum"),
    "energy": ChargeSpec("energy", "time_shift", "energy"),
    "galilean": ChargeSpec("galilean", "galilean", "galilean", time_dependent=True),
    "virial": ChargeSpec("virial", "scaling", "virial", requires_p=5.0, time_dependent=True),
    "pseudoconformal": ChargeSpec(
        "pseudoconformal", "sl2", "pseudoconformal", requires_p=5.0, time_dependent=True
    ),
}


def standard_charges(names: list[str] | None = None) -> list[ChargeSpec]:
    if names is None:
        return list(STANDARD_CHARGES.values())
    try:
        return [STANDARD_CHARGES[n] for n in names]
    except KeyError as err:
        raise ValueError(f"unknown charge {err.args[0]!r}") from None


def charge_series(traj: Trajectory, spec: ChargeSpec) -> np.ndarray:
    """The charge evaluated on every recorded snapshot."""
    return np.array(
        [spec.evaluate(u, t, traj.p) for u, t in zip(traj.states, traj.times)]
    )


@dataclass(frozen=True)
class DriftRow:
    charge: str
    initial: float
    max_abs_drift: float
    max_rel_drift: float
    t_at_max: float


def drift_report(traj: Trajectory, charges: list[ChargeSpec]) -> list[DriftRow]:
    """Per-charge conservation summary over the recorded snapshots."""
    rows = []
    for spec in charges:
        if spec.requires_p is not None and traj.p != spec.requires_p:
            raise ValueError(
                f"charge {spec.name!r} requires p = {spec.requires_p:g}, "
                f"trajectory has p = {traj.p:g}"
            )
        values = charge_series(traj, spec)
        drift = np.abs(values - values[0])
        scale = max(
            max(abs(spec.scale(u, t, traj.p)) for u, t in zip(traj.states, traj.times)),
            np.finfo(float).tiny,
        )
        i = int(np.argmax(drift))
        rows.append(
            DriftRow(
                charge=spec.name,
                initial=float(values[0]),
                max_abs_drift=float(drift[i]),
                max_rel_drift=float(drift[i] / scale),
                t_at_max=float(traj.times[i]),
            )
        )
    return rows


# ---------------------------------------------------------------------------
# Virial identities


def virial_residual_1(traj: Trajectory) -> np.ndarray:
    """Residual of d/dt(Im int x u_x conj(u)) = 4 H at interior times.

    The derivative is a centered difference of the recorded series; H is
    taken at t = 0 since it is conserved.  Meaningful for p = 5 runs.
    """
    if len(traj) < 3:
        raise ValueError("need at least 3 snapshots")
    h0 = hamiltonian(traj.states[0], traj.p)
    series = np.array([xp_moment(u) for u in traj.states])
    t = traj.times
    d_dt = (series[2:] - series[:-2]) / (t[2:] - t[:-2])
    return d_dt - 4.0 * h0


def variance_parabola(traj: Trajectory) -> tuple[float, float, float, float]:
    """Least-squares quadratic fit of int x^2 |u|^2 against time.

    Returns (c0, c1, c2, max_fit_residual).  At p = 5 the variance is an
    exact parabola with c1 = 2 Im int x conj(u) u_x |_(t=0) and c2 = 4 H.
    """
    if len(traj) < 3:
        raise ValueError("need at least 3 snapshots")
    v = np.array([variance(u) for u in traj.states])
    c2, c1, c0 = np.polyfit(traj.times, v, 2)
    fit = c0 + c1 * traj.times + c2 * traj.times**2
    return float(c0), float(c1), float(c2), float(np.max(np.abs(v - fit)))

"""
Acceptance suite: one callable check per release criterion.

Each criterion returns a :class:`CriterionResult`; ``run_all`` prints one
PASS/FAIL line per criterion.  The same functions back the pytest module
``tests/test_acceptance.py`` and the ``nlslab selftest`` subcommand.
All tolerances are fixed here, not configurable.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass

import numpy as np

from .charges import (
    ChargeSpec,
    drift_report,
    standard_charges,
    variance_parabola,
    virial_residual_1,
    xp_moment,
)
from .effective import (
    CONDITION_LIMIT,
    DegenerateOmegaError,
    effective_hamiltonian,
    integrate_effective,
)
from .geometry import (
    Trajectory,
    first_variation,
    grad_h,
    hamiltonian,
    hamiltonian_vf,
    kernel_residual,
)
from .grid import ExtTangent, Field, inner, make_grid, omega
from .presymplectic import (
    bisect_parameter,
    degeneracy_scan,
    extended_omega_matrix,
    ghw_manifold,
    omega_matrix,
    parabolic_plane_manifold,
    pfaffian,
    rank_with_tolerance,
    single_soliton_manifold,
)
from .profiles import gaussian_profile, random_localized, sech_profile
from .propagate import GroupElement, StepConfig, apply_group, evolve, exact_soliton

__all__ = ["CriterionResult", "run_all", "CRITERIA"]


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    runtime: float


def _result(number: int, name: str, started: float, checks: list[tuple[bool, str]]) -> CriterionResult:
    passed = all(ok for ok, _ in checks)
    detail = "; ".join(msg for _, msg in checks)
    return CriterionResult(number, name, passed, detail, time.time() - started)


def criterion_1_soliton_fidelity() -> CriterionResult:
    started = time.time()
    g = make_grid(512, 40.0)
    u0 = exact_soliton(1.0, 0.0, 0.0, 0.0, 0.0, g)
    traj = evolve(u0, 3.0, StepConfig(dt=1e-3, t_final=1.0, observer_stride=1000))
    err = (traj.states[-1] - exact_soliton(1.0, 0.0, 0.0, 0.0, 1.0, g)).norm()
    elapsed = time.time() - started
    return _result(1, "soliton fidelity", started, [
        (err < 1e-6, f"L2 error {err:.3e} < 1e-6"),
        (elapsed < 10.0, f"runtime {elapsed:.1f}s < 10s"),
    ])


def _quintic_run() -> Trajectory:
    g = make_grid(1024, 80.0)
    u0 = 0.3 * sech_profile(g)
    return evolve(u0, 5.0, StepConfig(dt=1e-3, t_final=5.0, observer_stride=5))


def criterion_2_conservation_suite() -> CriterionResult:
    started = time.time()
    g = make_grid(512, 40.0)
    boosted = exact_soliton(1.0, 0.3, 0.0, 0.0, 0.0, g)
    traj3 = evolve(boosted, 3.0, StepConfig(dt=1e-3, t_final=5.0, observer_stride=10))
    rows = {r.charge: r for r in drift_report(
        traj3, standard_charges(["mass", "momentum", "energy", "galilean"]))}
    checks = [
        (rows["mass"].max_rel_drift < 1e-11, f"mass drift {rows['mass'].max_rel_drift:.2e} < 1e-11"),
        (rows["energy"].max_rel_drift < 1e-6, f"energy drift {rows['energy'].max_rel_drift:.2e} < 1e-6"),
        (rows["momentum"].max_rel_drift < 1e-9, f"momentum drift {rows['momentum'].max_rel_drift:.2e} < 1e-9"),
        (rows["galilean"].max_rel_drift < 1e-5, f"galilean drift {rows['galilean'].max_rel_drift:.2e} < 1e-5"),
    ]

    traj5 = _quintic_run()
    rows5 = {r.charge: r for r in drift_report(
        traj5, standard_charges(["virial", "pseudoconformal"]))}
    checks += [
        (rows5["virial"].max_rel_drift < 1e-5,
         f"virial drift {rows5['virial'].max_rel_drift:.2e} < 1e-5"),
        (rows5["pseudoconformal"].max_rel_drift < 1e-5,
         f"pseudoconformal drift {rows5['pseudoconformal'].max_rel_drift:.2e} < 1e-5"),
    ]

    # negative controls: the quintic-only charges must NOT be conserved at p=3
    control_specs = [
        ChargeSpec("virial", "scaling", "virial", requires_p=None, time_dependent=True),
        ChargeSpec("pseudoconformal", "sl2", "pseudoconformal", requires_p=None, time_dependent=True),
    ]
    control_traj = evolve(
        exact_soliton(1.0, 0.0, 0.0, 0.0, 0.0, g), 3.0,
        StepConfig(dt=1e-3, t_final=5.0, observer_stride=50),
    )
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        controls = drift_report(control_traj, control_specs)
    for row in controls:
        checks.append((row.max_rel_drift > 1e-2,
                       f"control {row.charge} drift {row.max_rel_drift:.2e} > 1e-2"))
    elapsed = time.time() - started
    checks.append((elapsed < 120.0, f"runtime {elapsed:.1f}s < 120s"))
    return _result(2, "conservation suite", started, checks)


def criterion_3_virial_identities() -> CriterionResult:
    started = time.time()
    traj = _quintic_run()
    u0 = traj.states[0]
    h0 = hamiltonian(u0, 5.0)
    res = float(np.max(np.abs(virial_residual_1(traj)))) / abs(4 * h0)
    c0, c1, c2, _ = variance_parabola(traj)
    c1_target = 2.0 * xp_moment(u0)
    checks = [
        (res < 1e-3, f"d/dt identity residual {res:.2e} < 1e-3"),
        (abs(c2 - 4 * h0) / abs(4 * h0) < 1e-3,
         f"c2 = {c2:.6e} matches 4H to {abs(c2 - 4*h0)/abs(4*h0):.2e}"),
        (abs(c1 - c1_target) < 1e-6, f"c1 dev {abs(c1 - c1_target):.2e} < 1e-6"),
        # frozen sign: the quadratic coefficient carries +4H, not -4H
        (c2 > 0 and h0 > 0, f"sign regression: c2 = {c2:.3e} and H = {h0:.3e} both positive"),
    ]
    elapsed = time.time() - started
    checks.append((elapsed < 60.0, f"runtime {elapsed:.1f}s < 60s"))
    return _result(3, "virial identities", started, checks)


def criterion_4_kernel() -> CriterionResult:
    started = time.time()
    g = make_grid(512, 40.0)
    fields = [
        exact_soliton(1.0, 0.0, 0.0, 0.0, 0.0, g),
        exact_soliton(0.8, 0.4, 1.0, 0.3, 0.0, g),
        0.7 * gaussian_profile(g, width=2.0),
        0.5 * (sech_profile(g, center=-3.0) + sech_profile(g, center=3.0)),
        random_localized(g, 11, envelope_width=3.0),
    ]
    worst = 0.0
    for i, u in enumerate(fields):
        for p in (3.0, 5.0):
            worst = max(worst, kernel_residual(u, p, 100, seed=1000 + i))
    elapsed = time.time() - started
    return _result(4, "kernel of the extended two-form", started, [
        (worst < 1e-9, f"max kernel residual {worst:.2e} < 1e-9 (5 fields x p in {{3,5}})"),
        (elapsed < 30.0, f"runtime {elapsed:.1f}s < 30s"),
    ])


def criterion_5_least_action() -> CriterionResult:
    started = time.time()
    g = make_grid(512, 40.0)
    traj = evolve(
        exact_soliton(1.0, 0.0, 0.0, 0.0, 0.0, g), 3.0,
        StepConfig(dt=5e-4, t_final=1.0, observer_stride=1),
    )
    bump = np.sin(np.pi * traj.times / traj.times[-1]) ** 2
    bump[0] = bump[-1] = 0.0
    re_part = random_localized(g, 42, envelope_width=3.0)
    im_part = random_localized(g, 43, envelope_width=3.0)
    pert = [Field(g, 8.0 * b * (re_part.values + 0.5j * im_part.values)) for b in bump]

    def slope(curve: Trajectory) -> float:
        f1 = first_variation(curve, pert, 1e-2)
        f2 = first_variation(curve, pert, 1e-3)
        return float((np.log(abs(f1)) - np.log(abs(f2))) / np.log(10.0))

    s_solution = slope(traj)
    frozen = Trajectory(traj.times, [traj.states[0]] * len(traj), 3.0)
    s_frozen = slope(frozen)
    elapsed = time.time() - started
    return _result(5, "least action", started, [
        (abs(s_solution - 2.0) <= 0.1, f"solution slope {s_solution:.3f} = 2.0 +/- 0.1"),
        (abs(s_frozen) < 0.5, f"non-solution slope {s_frozen:.3f} < 0.5"),
        (elapsed < 60.0, f"runtime {elapsed:.1f}s < 60s"),
    ])


def criterion_6_gradient_and_vf() -> CriterionResult:
    started = time.time()
    g = make_grid(512, 40.0)
    eps = 1e-5
    worst_fd = 0.0
    worst_vf = 0.0
    for seed in range(100):
        u = random_localized(g, 2000 + seed, envelope_width=3.0)
        v = random_localized(g, 3000 + seed, envelope_width=3.0)
        p = 3.0 if seed % 2 == 0 else 5.0
        dh = inner(grad_h(u, p), v)
        fd = (hamiltonian(u + eps * v, p) - hamiltonian(u - eps * v, p)) / (2 * eps)
        worst_fd = max(worst_fd, abs(fd - dh) / max(abs(dh), 1e-30))
        worst_vf = max(
            worst_vf, abs(omega(v, hamiltonian_vf(u, p)) - dh) / max(abs(dh), 1e-30)
        )
    return _result(6, "gradient and defining relation", started, [
        (worst_fd < 1e-6, f"finite-difference gradient rel error {worst_fd:.2e} < 1e-6"),
        (worst_vf < 1e-10, f"omega(v, Xi_H) vs dH(v) rel error {worst_vf:.2e} < 1e-10"),
    ])


def criterion_7_group_laws() -> CriterionResult:
    started = time.time()
    g = make_grid(512, 40.0)
    u = exact_soliton(1.0, 0.2, 0.5, 0.1, 0.0, g)
    checks = []

    # Galilean energy shift
    from .charges import mass as _mass, momentum as _momentum

    for s in (1.0, 0.6):
        boosted, _ = apply_group(u, 0.0, GroupElement.galilean(s), 3.0)
        dh = hamiltonian(boosted, 3.0) - hamiltonian(u, 3.0)
        pred = s**2 * _mass(u) / 4.0 + s * _momentum(u) / 2.0
        checks.append((abs(dh - pred) < 1e-8,
                       f"galilean dH(s={s}) dev {abs(dh - pred):.2e} < 1e-8"))

    # scaling pullback factor on omega and exact alpha-invariance at p = 5
    v = random_localized(g, 7, envelope_width=2.5)
    w = random_localized(g, 8, envelope_width=2.5)
    for p, s in ((3.0, 2.0), (5.0, 1.3)):
        vs, _ = apply_group(v, 0.0, GroupElement.scaling(s), p)
        ws, _ = apply_group(w, 0.0, GroupElement.scaling(s), p)
        factor = s ** ((5.0 - p) / (p - 1.0))
        dev = abs(omega(vs, ws) / omega(v, w) - factor)
        checks.append((dev < 1e-8, f"scaling omega factor (p={p}) dev {dev:.2e} < 1e-8"))
    from .geometry import alpha as _alpha

    s, t0, T = 1.3, 0.9, 0.37
    us, _ = apply_group(u, t0, GroupElement.scaling(s), 5.0)
    vs, _ = apply_group(v, t0, GroupElement.scaling(s), 5.0)
    a_pull = _alpha(us, 0.0, ExtTangent(vs, s**-2 * T), 5.0)
    a_orig = _alpha(u, t0, ExtTangent(v, T), 5.0)
    checks.append((abs(a_pull - a_orig) < 1e-8,
                   f"alpha invariance at p=5 dev {abs(a_pull - a_orig):.2e} < 1e-8"))

    # generator cross-validation against finite differences in s; the test
    # field has Gaussian tails so the rescaling branch sees no box edge
    from .propagate import group_generator

    x = g.nodes
    u_gen = Field(g, (np.exp(-(((x - 0.4) / 2.5) ** 2))
                      + 0.2 * np.exp(-(((x + 1.0) / 3.0) ** 2)))
                  * np.exp(0.3j * x))

    def fd_generator(kind: str, field: Field, t: float, p: float, h: float = 1e-4):
        if kind == "scaling":
            gp, gm = GroupElement.scaling(1 + h), GroupElement.scaling(1 - h)
        elif kind == "sl2":
            gp, gm = GroupElement.sl2_rotation(h), GroupElement.sl2_rotation(-h)
        else:
            gp, gm = GroupElement(kind, h), GroupElement(kind, -h)
        up, tp = apply_group(field, t, gp, p)
        um, tm = apply_group(field, t, gm, p)
        return (up.values - um.values) / (2 * h), (tp - tm) / (2 * h)

    t = 0.8
    for kind in ("phase", "translation", "time_shift", "galilean", "scaling", "sl2"):
        p = 5.0 if kind in ("scaling", "sl2") else 3.0
        gen = group_generator(kind, u_gen, t)
        fd_v, fd_t = fd_generator(kind, u_gen, t, p)
        scale = max(float(np.max(np.abs(gen.v.values))), abs(gen.t_component), 1e-30)
        dev = max(float(np.max(np.abs(gen.v.values - fd_v))),
                  abs(gen.t_component - fd_t)) / scale
        checks.append((dev < 1e-6, f"generator {kind} FD dev {dev:.2e} < 1e-6"))
    return _result(7, "group-action laws", started, checks)


def criterion_8_degeneracy_scan() -> CriterionResult:
    started = time.time()
    g = make_grid(1024, 120.0)
    m = ghw_manifold(g, gamma=0.1, restricted=True)
    result = degeneracy_scan(
        m, ("eta", 0.05, 1.2, 64), ("a", 0.11, 1.2, 64),
        fixed={"phi": 0.0, "psi": np.pi / 4},
    )
    worst = 0.0
    for i in (0, 21, 42, 63):
        for j in (0, 21, 42, 63):
            theta = m.theta_from({
                "eta": result.axis1_values[i], "a": result.axis2_values[j],
                "phi": 0.0, "psi": np.pi / 4,
            })
            om = omega_matrix(m, theta)
            scale = max(float(np.max(np.abs(om.entries))) ** 4, 1e-30)
            worst = max(worst, abs(pfaffian(om) ** 2 - np.linalg.det(om.entries)) / scale)
    elapsed = time.time() - started
    return _result(8, "two-mode degeneracy scan", started, [
        (result.curve_count >= 2,
         f"{result.curve_count} disjoint zero curves >= 2 "
         f"({len(result.zero_cells)} zero cells)"),
        (worst < 1e-10, f"Pf^2 = det to {worst:.2e} (sampled grid points)"),
        (elapsed < 180.0, f"runtime {elapsed:.1f}s < 180s"),
    ])


def criterion_9_finite_dimensional_example() -> CriterionResult:
    started = time.time()
    m = parabolic_plane_manifold()
    checks = []
    for xi2 in (-1.0, -0.4, 0.25, 0.8):
        r = rank_with_tolerance(omega_matrix(m, [0.3, xi2]), 1e-6)
        checks.append((r == 2, f"rank {r} = 2 at xi2 = {xi2}"))
    r0 = rank_with_tolerance(omega_matrix(m, [0.3, 0.0]), 1e-6)
    checks.append((r0 == 0, f"rank {r0} = 0 on the degeneracy line"))
    for xi2 in (-0.7, 0.0, 0.5):
        ext = extended_omega_matrix(m, [0.1, xi2])
        kdim = ext.k - rank_with_tolerance(ext, 1e-6)
        checks.append((kdim == 1, f"extended kernel dim {kdim} = 1 at xi2 = {xi2}"))
    return _result(9, "finite-dimensional example", started, checks)


def criterion_10_collective_dynamics() -> CriterionResult:
    started = time.time()
    g = make_grid(512, 40.0)
    m = single_soliton_manifold(g)
    theta0 = np.array([1.0, 0.0, 0.3, 0.0])
    states = integrate_effective(m, theta0, 3.0, 1e-2, 5.0)
    thf = states[-1].theta
    h_vals = [effective_hamiltonian(m, s.theta, 3.0) for s in states]
    h_drift = max(abs(h - h_vals[0]) for h in h_vals) / abs(h_vals[0])
    checks = [
        (abs(thf[1] - 1.5) < 1e-4, f"Z(5) error {abs(thf[1] - 1.5):.2e} < 1e-4"),
        (abs(thf[0] - 1.0) < 1e-6, f"eta(5) error {abs(thf[0] - 1.0):.2e} < 1e-6"),
        (h_drift < 1e-8, f"effective H drift {h_drift:.2e} < 1e-8"),
    ]

    # degeneracy halt on a zero-curve start of the two-mode ansatz
    g2 = make_grid(1024, 120.0)
    mr = ghw_manifold(g2, 0.1, restricted=True)
    base = {"eta": 0.8, "phi": 0.0, "psi": np.pi / 4}
    on_curve = bisect_parameter(mr, base, "a", 0.33, 0.37)
    try:
        integrate_effective(mr, mr.theta_from(on_curve), 3.0, 1e-2, 1.0)
        checks.append((False, "no degeneracy halt on a zero-curve start"))
    except DegenerateOmegaError as err:
        checks.append((err.condition >= CONDITION_LIMIT,
                       f"degeneracy halt at condition {err.condition:.2e} >= 1e8"))
    elapsed = time.time() - started
    checks.append((elapsed < 60.0, f"runtime {elapsed:.1f}s < 60s"))
    return _result(10, "collective dynamics", started, checks)


CRITERIA = [
    criterion_1_soliton_fidelity,
    criterion_2_conservation_suite,
    criterion_3_virial_identities,
    criterion_4_kernel,
    criterion_5_least_action,
    criterion_6_gradient_and_vf,
    criterion_7_group_laws,
    criterion_8_degeneracy_scan,
    criterion_9_finite_dimensional_example,
    criterion_10_collective_dynamics,
]


def run_all(verbose: bool = True) -> list[CriterionResult]:
    results = []
    for fn in CRITERIA:
        res = fn()
        results.append(res)
        if verbose:
            status = "PASS" if res.passed else "FAIL"
            print(f"{status}  criterion {res.number:2d} ({res.name}): "
                  f"{res.detail} [{res.runtime:.1f}s]")
    return results

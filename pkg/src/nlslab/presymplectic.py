"""
Restriction of the symplectic form to ansatz manifolds and its degeneracies.

An :class:`AnsatzManifold` is a smooth parametrization theta -> u(theta) of
either grid fields or points of a finite-dimensional phase space R^(2n)
(packed as complex vectors x + i xi, so the same formula
``omega(v, w) = Im sum v conj(w)`` serves both).  Restricting omega to the
tangent space at theta gives the antisymmetric Gram matrix

    Omega_ij = omega(d u / d theta_i, d u / d theta_j),

whose Pfaffian detects degeneracy: Pf^2 = det, and a sign change of Pf
along a parameter path crosses a degeneracy curve where the rank drops by
two.  ``degeneracy_scan`` maps Pf over a 2-D parameter window and extracts
the zero-level set by marching squares.

Built-in families: the four-parameter travelling soliton, the two-mode
soliton + defect-mode ansatz (six parameters, or four with the position and
velocity frozen), a nondegenerate Darboux toy, and a parabolic plane in
R^4 whose restricted form degenerates exactly on a line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .geometry import hamiltonian
from .grid import Field, Grid

__all__ = [
    "AnsatzManifold",
    "AntisymMatrix",
    "ScanResult",
    "tangent_basis",
    "omega_matrix",
    "extended_omega_matrix",
    "pullback_hamiltonian",
    "pullback_energy_gradient",
    "pfaffian",
    "rank_with_tolerance",
    "ghw_ansatz",
    "single_soliton_ansatz",
    "single_soliton_manifold",
    "ghw_manifold",
    "parabolic_plane_manifold",
    "darboux_manifold",
    "degeneracy_scan",
    "marching_segments",
    "bisect_parameter",
    "sech_power_integral",
]


@dataclass(frozen=True)
class AnsatzManifold:
    """A named parametrization theta in R^k -> phase-space point.

    ``embed`` returns complex sample values; when ``grid`` is set they are
    field values on it, otherwise a point of C^n carrying the standard
    symplectic structure.  ``tangents`` supplies analytic parameter
    derivatives; when absent, central differences with per-parameter step
    ``fd_step * max(1, |theta_i|)`` are used.  ``domain`` is a box of
    (lo, hi) bounds per parameter.
    """

    name: str
    param_names: tuple[str, ...]
    embed: Callable[[np.ndarray], np.ndarray]
    grid: Grid | None = None
    tangents: Callable[[np.ndarray], list[np.ndarray]] | None = None
    domain: tuple[tuple[float, float], ...] | None = None
    fd_step: float = 1e-5
    phase_hamiltonian: Callable[[np.ndarray], float] | None = None
    energy_theta: Callable[[np.ndarray, float], float] | None = None
    energy_grad_theta: Callable[[np.ndarray, float], np.ndarray] | None = None

    def __post_init__(self) -> None:
        if len(self.param_names) < 2:
            raise ValueError("an ansatz manifold needs at least 2 parameters")
        if self.domain is not None and len(self.domain) != len(self.param_names):
            raise ValueError("domain box must list one interval per parameter")

    @property
    def k(self) -> int:
        return len(self.param_names)

    def check_domain(self, theta: np.ndarray, margin: float = 0.0) -> None:
        if self.domain is None:
            return
        for name, val, (lo, hi) in zip(self.param_names, theta, self.domain):
            pad = margin * max(1.0, abs(val))
            if not (lo + pad <= val <= hi - pad):
                raise ValueError(
                    f"{self.name}: parameter {name} = {val:g} outside "
                    f"domain ({lo:g}, {hi:g}) with margin {pad:g}"
                )

    def omega_pair(self, v: np.ndarray, w: np.ndarray) -> float:
        """omega(v, w) = Im int v conj(w); weighted by dx on a grid."""
        s = np.vdot(w, v).imag  # vdot conjugates w: sum(v * conj(w))
        return float(self.grid.dx * s) if self.grid is not None else float(s)

    def field(self, theta: np.ndarray) -> Field:
        if self.grid is None:
            raise ValueError(f"{self.name} is not a field manifold")
        return Field(self.grid, self.embed(np.asarray(theta, dtype=float)))

    def theta_from(self, assignments: dict[str, float]) -> np.ndarray:
        missing = set(self.param_names) - set(assignments)
        extra = set(assignments) - set(self.param_names)
        if missing or extra:
            raise ValueError(
                f"{self.name}: parameter mismatch (missing {sorted(missing)}, "
                f"unknown {sorted(extra)})"
            )
        return np.array([assignments[n] for n in self.param_names], dtype=float)


def tangent_basis(m: AnsatzManifold, theta: np.ndarray) -> list[np.ndarray]:
    """Parameter derivatives du/dtheta_i, analytic when available."""
    theta = np.asarray(theta, dtype=float)
    if m.tangents is not None:
        return [np.asarray(t, dtype=complex) for t in m.tangents(theta)]
    m.check_domain(theta, margin=2.0 * m.fd_step)
    out = []
    for i in range(m.k):
        h = m.fd_step * max(1.0, abs(theta[i]))
        tp = theta.copy()
        tm = theta.copy()
        tp[i] += h
        tm[i] -= h
        out.append((m.embed(tp) - m.embed(tm)) / (2.0 * h))
    return out


@dataclass(frozen=True)
class AntisymMatrix:
    """Real antisymmetric matrix with the symmetrization correction recorded."""

    entries: np.ndarray
    sym_correction: float = 0.0

    def __post_init__(self) -> None:
        a = np.asarray(self.entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("entries must be square")
        scale = max(1.0, float(np.max(np.abs(a))) if a.size else 0.0)
        if float(np.max(np.abs(a + a.T))) > 1e-12 * scale:
            raise ValueError("matrix is not antisymmetric")
        a = np.ascontiguousarray(a)
        a.flags.writeable = False
        object.__setattr__(self, "entries", a)

    @classmethod
    def from_raw(cls, raw: np.ndarray) -> "AntisymMatrix":
        raw = np.asarray(raw, dtype=float)
        anti = 0.5 * (raw - raw.T)
        return cls(anti, sym_correction=float(np.max(np.abs(raw - anti))))

    @property
    def k(self) -> int:
        return self.entries.shape[0]


def omega_matrix(m: AnsatzManifold, theta: np.ndarray) -> AntisymMatrix:
    """Gram matrix Omega_ij = omega(du/dtheta_i, du/dtheta_j) at theta."""
    tangents = tangent_basis(m, theta)
    k = len(tangents)
    raw = np.empty((k, k))
    for i in range(k):
        for j in range(k):
            raw[i, j] = m.omega_pair(tangents[i], tangents[j])
    return AntisymMatrix.from_raw(raw)


def pullback_hamiltonian(m: AnsatzManifold, theta: np.ndarray, p: float | None = None) -> float:
    """Energy of the embedded point: NLS Hamiltonian on field manifolds,
    the manifold's own phase-space Hamiltonian otherwise."""
    theta = np.asarray(theta, dtype=float)
    if m.energy_theta is not None and p is not None:
        return m.energy_theta(theta, p)
    if m.grid is not None:
        if p is None:
            raise ValueError("field manifolds need the nonlinearity power")
        return hamiltonian(m.field(theta), p)
    if m.phase_hamiltonian is None:
        raise ValueError(f"{m.name} has no Hamiltonian attached")
    return float(m.phase_hamiltonian(m.embed(theta)))


def pullback_energy_gradient(
    m: AnsatzManifold, theta: np.ndarray, p: float | None = None, step: float = 1e-6
) -> np.ndarray:
    """Gradient of the pulled-back energy, analytic when the manifold has one."""
    theta = np.asarray(theta, dtype=float)
    if m.energy_grad_theta is not None and p is not None:
        return np.asarray(m.energy_grad_theta(theta, p), dtype=float)
    grad = np.empty(m.k)
    for i in range(m.k):
        h = step * max(1.0, abs(theta[i]))
        tp = theta.copy()
        tm = theta.copy()
        tp[i] += h
        tm[i] -= h
        grad[i] = (pullback_hamiltonian(m, tp, p) - pullback_hamiltonian(m, tm, p)) / (2 * h)
    return grad


def extended_omega_matrix(
    m: AnsatzManifold, theta: np.ndarray, p: float | None = None
) -> AntisymMatrix:
    """The two-form on the extended manifold (theta, t) in the basis of the
    parameter tangents plus the time direction:

        [[ Omega, -grad_theta H ],
         [ grad_theta H^T,  0   ]]
    """
    om = omega_matrix(m, theta).entries
    g = pullback_energy_gradient(m, theta, p)
    k = m.k
    ext = np.zeros((k + 1, k + 1))
    ext[:k, :k] = om
    ext[:k, k] = -g
    ext[k, :k] = g
    return AntisymMatrix(ext)


# ---------------------------------------------------------------------------
# Pfaffian and rank


def _entries(a) -> np.ndarray:
    return a.entries if isinstance(a, AntisymMatrix) else np.asarray(a, dtype=float)


def pfaffian(a) -> float:
    """Pfaffian of a real antisymmetric matrix by elimination with pivoting.

    Returns 0 for odd dimension.  Satisfies Pf(A)^2 = det(A).
    """
    mat = _entries(a).copy()
    n = mat.shape[0]
    if n % 2 == 1:
        return 0.0
    pf = 1.0
    for k in range(0, n - 1, 2):
        # pivot: largest entry in column k below the diagonal
        kp = k + 1 + int(np.argmax(np.abs(mat[k + 1 :, k])))
        if mat[kp, k] == 0.0:
            return 0.0
        if kp != k + 1:
            mat[[k + 1, kp], :] = mat[[kp, k + 1], :]
            mat[:, [k + 1, kp]] = mat[:, [kp, k + 1]]
            pf = -pf
        pf *= mat[k, k + 1]
        if k + 2 < n:
            tau = mat[k + 2 :, k] / mat[k + 1, k]
            col = mat[k + 2 :, k + 1]
            mat[k + 2 :, k + 2 :] += np.outer(tau, col) - np.outer(col, tau)
    return float(pf)


def rank_with_tolerance(a, tol: float) -> int:
    """Number of singular values above tol * sigma_max."""
    if not tol > 0:
        raise ValueError("tolerance must be positive")
    sv = np.linalg.svd(_entries(a), compute_uv=False)
    if sv.size == 0 or sv[0] == 0.0:
        return 0
    return int(np.sum(sv > tol * sv[0]))


# ---------------------------------------------------------------------------
# Built-in ansatz families


def sech_power_integral(q: float) -> float:
    """int_R sech^q = sqrt(pi) Gamma(q/2) / Gamma((q+1)/2)."""
    return math.sqrt(math.pi) * math.gamma(q / 2.0) / math.gamma((q + 1.0) / 2.0)


def single_soliton_ansatz(grid: Grid, eta: float, Z: float, V: float, phi: float) -> Field:
    """Travelling soliton profile eta sech(eta (x - Z)) exp(i (V x + phi))."""
    if not eta > 0:
        raise ValueError("eta must be positive")
    x = grid.nodes
    return Field(grid, eta / np.cosh(eta * (x - Z)) * np.exp(1j * (V * x + phi)))


def _soliton_tangents(grid: Grid, theta: np.ndarray) -> list[np.ndarray]:
    eta, Z, V, phi = theta
    x = grid.nodes
    xi = eta * (x - Z)
    sech = 1.0 / np.cosh(xi)
    dsech = -sech * np.tanh(xi)
    plane = np.exp(1j * (V * x + phi))
    u = eta * sech * plane
    return [
        (sech + eta * (x - Z) * dsech) * plane,  # d/d eta
        -(eta**2) * dsech * plane,  # d/d Z
        1j * x * u,  # d/d V
        1j * u,  # d/d phi
    ]


def single_soliton_manifold(grid: Grid) -> AnsatzManifold:
    """Four-parameter soliton family (eta, Z, V, phi) with analytic tangents
    and a closed-form pulled-back energy."""

    def embed(theta: np.ndarray) -> np.ndarray:
        return single_soliton_ansatz(grid, *theta).values

    def energy(theta: np.ndarray, p: float) -> float:
        eta, _, V, _ = theta
        return (
            eta**3 / 6.0
            + eta * V**2 / 2.0
            - eta**p / (p + 1.0) * sech_power_integral(p + 1.0)
        )

    def energy_grad(theta: np.ndarray, p: float) -> np.ndarray:
        eta, _, V, _ = theta
        d_eta = (
            eta**2 / 2.0
            + V**2 / 2.0
            - p * eta ** (p - 1.0) / (p + 1.0) * sech_power_integral(p + 1.0)
        )
        return np.array([d_eta, 0.0, eta * V, 0.0])

    return AnsatzManifold(
        name="single_soliton",
        param_names=("eta", "Z", "V", "phi"),
        embed=embed,
        grid=grid,
        tangents=lambda theta: _soliton_tangents(grid, theta),
        domain=((1e-6, np.inf), (-np.inf, np.inf), (-np.inf, np.inf), (-np.inf, np.inf)),
        energy_theta=energy,
        energy_grad_theta=energy_grad,
    )


def ghw_ansatz(
    grid: Grid,
    eta: float,
    Z: float,
    V: float,
    phi: float,
    a: float,
    psi: float,
    gamma: float,
) -> Field:
    """Two-mode ansatz: a free soliton plus a defect-pinned mode,

        u = eta sech(eta x - Z) e^(i V x - i phi)
          + a sech(a x + atanh(gamma/a)) e^(-i (phi + psi)).

    Requires a > gamma > 0 so the pinning offset atanh(gamma/a) is defined;
    eta = 0 is allowed and leaves the defect mode alone.
    """
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    if not a > gamma:
        raise ValueError(f"need a > gamma (= {gamma:g}), got a = {a:g}")
    if eta < 0:
        raise ValueError("eta must be nonnegative")
    x = grid.nodes
    u_s = eta / np.cosh(eta * x - Z) * np.exp(1j * (V * x - phi))
    u_d = a / np.cosh(a * x + np.arctanh(gamma / a)) * np.exp(-1j * (phi + psi))
    return Field(grid, u_s + u_d)


def _ghw_tangents(grid: Grid, theta6: np.ndarray, gamma: float) -> list[np.ndarray]:
    eta, Z, V, phi, a, psi = theta6
    if not a > gamma:
        raise ValueError(f"need a > gamma (= {gamma:g}), got a = {a:g}")
    x = grid.nodes
    w_s = eta * x - Z
    sech_s = 1.0 / np.cosh(w_s)
    dsech_s = -sech_s * np.tanh(w_s)
    phase_s = np.exp(1j * (V * x - phi))
    u_s = eta * sech_s * phase_s

    tau = np.arctanh(gamma / a)
    dtau = -gamma / (a**2 - gamma**2)
    w_d = a * x + tau
    sech_d = 1.0 / np.cosh(w_d)
    dsech_d = -sech_d * np.tanh(w_d)
    phase_d = np.exp(-1j * (phi + psi))
    u_d = a * sech_d * phase_d

    return [
        (sech_s + eta * x * dsech_s) * phase_s,  # d/d eta
        -eta * dsech_s * phase_s,  # d/d Z
        1j * x * u_s,  # d/d V
        -1j * (u_s + u_d),  # d/d phi
        (sech_d + a * (x + dtau) * dsech_d) * phase_d,  # d/d a
        -1j * u_d,  # d/d psi
    ]


def ghw_manifold(grid: Grid, gamma: float, restricted: bool = True) -> AnsatzManifold:
    """Two-mode ansatz manifold.

    Restricted (default): parameters (eta, phi, a, psi) with the soliton
    position and velocity frozen at Z = V = 0, the plane scanned for
    degeneracies.  Full: all six parameters (eta, Z, V, phi, a, psi).
    """
    if restricted:
        names = ("eta", "phi", "a", "psi")

        def lift(theta: np.ndarray) -> np.ndarray:
            eta, phi, a, psi = theta
            return np.array([eta, 0.0, 0.0, phi, a, psi])

        def embed(theta: np.ndarray) -> np.ndarray:
            eta, phi, a, psi = theta
            return ghw_ansatz(grid, eta, 0.0, 0.0, phi, a, psi, gamma).values

        def tangents(theta: np.ndarray) -> list[np.ndarray]:
            full = _ghw_tangents(grid, lift(theta), gamma)
            return [full[0], full[3], full[4], full[5]]

        domain = ((0.0, np.inf), (-np.inf, np.inf), (gamma, np.inf), (-np.inf, np.inf))
        name = "ghw_restricted"
    else:
        names = ("eta", "Z", "V", "phi", "a", "psi")

        def embed(theta: np.ndarray) -> np.ndarray:
            eta, Z, V, phi, a, psi = theta
            return ghw_ansatz(grid, eta, Z, V, phi, a, psi, gamma).values

        def tangents(theta: np.ndarray) -> list[np.ndarray]:
            return _ghw_tangents(grid, theta, gamma)

        domain = (
            (0.0, np.inf),
            (-np.inf, np.inf),
            (-np.inf, np.inf),
            (-np.inf, np.inf),
            (gamma, np.inf),
            (-np.inf, np.inf),
        )
        name = "ghw"
    return AnsatzManifold(
        name=name,
        param_names=names,
        embed=embed,
        grid=grid,
        tangents=tangents,
        domain=domain,
    )


def parabolic_plane_manifold() -> AnsatzManifold:
    """A plane in the 4-dimensional phase space bent along a parabola:

        (x1, xi2) -> (x1, x2, xi1, xi2) = (x1, 0, xi2^2, xi2),

    with Hamiltonian H = x1.  The restricted form is 2 xi2 dxi2 ^ dx1, so it
    degenerates exactly on the line xi2 = 0 while the extended form keeps a
    one-dimensional kernel everywhere.
    """

    def embed(theta: np.ndarray) -> np.ndarray:
        x1, xi2 = theta
        return np.array([x1 + 1j * xi2**2, 1j * xi2])

    def tangents(theta: np.ndarray) -> list[np.ndarray]:
        _, xi2 = theta
        return [np.array([1.0 + 0j, 0j]), np.array([2j * xi2, 1j])]

    return AnsatzManifold(
        name="parabolic_plane",
        param_names=("x1", "xi2"),
        embed=embed,
        tangents=tangents,
        phase_hamiltonian=lambda z: float(z[0].real),
    )


def darboux_manifold(pairs: int = 1) -> AnsatzManifold:
    """Nondegenerate toy: standard Darboux coordinates, Pf = +/- 1 everywhere."""
    if pairs < 1:
        raise ValueError("need at least one coordinate pair")
    names = tuple(f"x{i+1}" for i in range(pairs)) + tuple(f"xi{i+1}" for i in range(pairs))

    def embed(theta: np.ndarray) -> np.ndarray:
        return theta[:pairs] + 1j * theta[pairs:]

    def tangents(theta: np.ndarray) -> list[np.ndarray]:
        eye = np.eye(pairs)
        return [eye[i] + 0j for i in range(pairs)] + [1j * eye[i] for i in range(pairs)]

    return AnsatzManifold(
        name=f"darboux{2 * pairs}",
        param_names=names,
        embed=embed,
        tangents=tangents,
        phase_hamiltonian=lambda z: float(np.sum(np.abs(z) ** 2)) / 2.0,
    )


# ---------------------------------------------------------------------------
# Degeneracy scan and zero-level-set extraction


@dataclass(frozen=True)
class ScanResult:
    """Pfaffian of the restricted form over a 2-D parameter window."""

    manifold: str
    axis1_name: str
    axis2_name: str
    axis1_values: np.ndarray
    axis2_values: np.ndarray
    pf: np.ndarray  # shape (n1, n2)
    fixed: dict[str, float]
    tol: float
    zero_cells: tuple[tuple[int, int], ...]
    segments: tuple[tuple[tuple[float, float], tuple[float, float]], ...]
    curve_count: int


def _zero_cells(pf: np.ndarray, tol_abs: float) -> list[tuple[int, int]]:
    cells = []
    for i in range(pf.shape[0] - 1):
        for j in range(pf.shape[1] - 1):
            corners = pf[i : i + 2, j : j + 2]
            if corners.min() <= tol_abs and corners.max() >= -tol_abs:
                cells.append((i, j))
    return cells


def _connected_components(cells: list[tuple[int, int]], connectivity: int = 8) -> int:
    remaining = set(cells)
    if connectivity == 8:
        offsets = [(di, dj) for di in (-1, 0, 1) for dj in (-1, 0, 1) if (di, dj) != (0, 0)]
    else:
        offsets = [(-1, 0), (1, 0), (0, -1), (0, 1)]
    count = 0
    while remaining:
        stack = [remaining.pop()]
        count += 1
        while stack:
            ci, cj = stack.pop()
            for di, dj in offsets:
                nb = (ci + di, cj + dj)
                if nb in remaining:
                    remaining.remove(nb)
                    stack.append(nb)
    return count


def _edge_crossing(v1: float, v2: float, x1: float, x2: float) -> float | None:
    """Linear-interpolation zero between two corner values, if signs differ."""
    if v1 == 0.0:
        return x1
    if v2 == 0.0:
        return x2
    if (v1 > 0) == (v2 > 0):
        return None
    return x1 + (x2 - x1) * v1 / (v1 - v2)


def marching_segments(
    a1: np.ndarray, a2: np.ndarray, pf: np.ndarray
) -> list[tuple[tuple[float, float], tuple[float, float]]]:
    """Zero-level-set segments of pf on the grid a1 x a2 (marching squares)."""
    segments = []
    for i in range(len(a1) - 1):
        for j in range(len(a2) - 1):
            v00, v01 = pf[i, j], pf[i, j + 1]
            v10, v11 = pf[i + 1, j], pf[i + 1, j + 1]
            pts = []
            c = _edge_crossing(v00, v01, a2[j], a2[j + 1])
            if c is not None:
                pts.append((a1[i], c))
            c = _edge_crossing(v10, v11, a2[j], a2[j + 1])
            if c is not None:
                pts.append((a1[i + 1], c))
            c = _edge_crossing(v00, v10, a1[i], a1[i + 1])
            if c is not None:
                pts.append((c, a2[j]))
            c = _edge_crossing(v01, v11, a1[i], a1[i + 1])
            if c is not None:
                pts.append((c, a2[j + 1]))
            if len(pts) == 2:
                segments.append((pts[0], pts[1]))
            elif len(pts) == 4:
                # saddle cell: pair crossings by the sign of the center
                center = 0.25 * (v00 + v01 + v10 + v11)
                if (center > 0) == (v00 > 0):
                    segments.append((pts[0], pts[3]))
                    segments.append((pts[1], pts[2]))
                else:
                    segments.append((pts[0], pts[2]))
                    segments.append((pts[1], pts[3]))
    return segments


def degeneracy_scan(
    m: AnsatzManifold,
    axis1: tuple[str, float, float, int],
    axis2: tuple[str, float, float, int],
    fixed: dict[str, float],
    tol: float = 1e-9,
) -> ScanResult:
    """Map the Pfaffian of the restricted form over a parameter window.

    ``axis1``/``axis2`` are (parameter name, low, high, count); ``fixed``
    assigns every remaining parameter.  Cells where Pf changes sign (or
    falls below ``tol`` times the scan maximum) form the zero-level set;
    the curve count is the number of connected components of those cells.
    """
    name1, lo1, hi1, n1 = axis1
    name2, lo2, hi2, n2 = axis2
    for nm in (name1, name2):
        if nm not in m.param_names:
            raise ValueError(f"{nm!r} is not a parameter of {m.name}")
    if name1 == name2:
        raise ValueError("scan axes must differ")
    vals1 = np.linspace(lo1, hi1, n1)
    vals2 = np.linspace(lo2, hi2, n2)
    pf = np.empty((n1, n2))
    assignments = dict(fixed)
    for i, v1 in enumerate(vals1):
        for j, v2 in enumerate(vals2):
            assignments[name1] = float(v1)
            assignments[name2] = float(v2)
            theta = m.theta_from(assignments)
            pf[i, j] = pfaffian(omega_matrix(m, theta))
    tol_abs = tol * float(np.max(np.abs(pf))) if pf.size else 0.0
    cells = _zero_cells(pf, tol_abs)
    segments = marching_segments(vals1, vals2, pf)
    return ScanResult(
        manifold=m.name,
        axis1_name=name1,
        axis2_name=name2,
        axis1_values=vals1,
        axis2_values=vals2,
        pf=pf,
        fixed=dict(fixed),
        tol=tol,
        zero_cells=tuple(cells),
        segments=tuple(segments),
        curve_count=_connected_components(cells),
    )


def bisect_parameter(
    m: AnsatzManifold,
    base: dict[str, float],
    name: str,
    lo: float,
    hi: float,
    tol: float = 1e-13,
    max_iter: int = 200,
) -> dict[str, float]:
    """Refine one parameter to a Pfaffian zero crossing by bisection.

    ``base`` assigns all other parameters; the Pfaffian must change sign
    between lo and hi.  Returns the full assignment at the refined zero.
    """

    def pf_at(v: float) -> float:
        assignments = dict(base)
        assignments[name] = v
        return pfaffian(omega_matrix(m, m.theta_from(assignments)))

    f_lo, f_hi = pf_at(lo), pf_at(hi)
    if f_lo == 0.0:
        hi = lo
    elif f_hi != 0.0 and (f_lo > 0) == (f_hi > 0):
        raise ValueError(f"no sign change of Pf in [{lo:g}, {hi:g}]")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        f_mid = pf_at(mid)
        if abs(f_mid) <= tol or hi - lo < 1e-15 * max(1.0, abs(mid)):
            lo = hi = mid
            break
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    out = dict(base)
    out[name] = 0.5 * (lo + hi)
    return out

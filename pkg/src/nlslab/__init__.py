"""
nlslab: a numerical laboratory for the 1-D focusing nonlinear Schrodinger
equation i u_t = -1/2 u_xx - |u|^(p-1) u on a periodic box.

Subsystems
----------
grid          periodic grid, fields, quadrature, inner product and
              symplectic form
geometry      Hamiltonian, its vector field, the extended one-form and
              two-form, Lagrangian, action, first variation
propagate     Strang split-step flow, reference soliton, symmetry group
              operators and their generators
charges       conserved charges, drift monitoring, virial identities
presymplectic ansatz manifolds, restricted symplectic Gram matrices,
              Pfaffian, degeneracy scans
effective     collective-coordinate dynamics and PDE comparison
cli           experiment runner with deterministic CSV outputs
"""

from .grid import (
    BoundaryMassWarning,
    ExtTangent,
    Field,
    Grid,
    boundary_mass_fraction,
    inner,
    make_grid,
    moment,
    omega,
    quadrature,
    read_field_csv,
    spectral_derivative,
    write_field_csv,
)
from .geometry import (
    Trajectory,
    action,
    alpha,
    first_variation,
    grad_h,
    hamiltonian,
    hamiltonian_vf,
    kernel_residual,
    lagrangian,
    omega_ext,
)
from .propagate import (
    BlowUpError,
    GroupElement,
    StepConfig,
    apply_group,
    evolve,
    exact_soliton,
    group_generator,
    strang_step,
)
from .charges import (
    ChargeSpec,
    DriftRow,
    NonConservedChargeWarning,
    drift_report,
    energy,
    galilean_charge,
    mass,
    momentum,
    noether_from_generator,
    pseudoconformal_charge,
    standard_charges,
    variance_parabola,
    virial_charge,
    virial_residual_1,
)
from .presymplectic import (
    AnsatzManifold,
    AntisymMatrix,
    ScanResult,
    darboux_manifold,
    degeneracy_scan,
    extended_omega_matrix,
    ghw_ansatz,
    ghw_manifold,
    omega_matrix,
    parabolic_plane_manifold,
    pfaffian,
    rank_with_tolerance,
    single_soliton_ansatz,
    single_soliton_manifold,
    tangent_basis,
)
from .effective import (
    ComparisonReport,
    DegenerateOmegaError,
    DomainExitError,
    EffectiveState,
    compare_with_pde,
    effective_hamiltonian,
    effective_rhs,
    integrate_effective,
)

__version__ = "0.1.0"

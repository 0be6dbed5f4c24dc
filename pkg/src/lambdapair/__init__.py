"""Two dipole-dipole coupled Lambda atoms under biharmonic driving.

Units throughout: hbar = 1 and gamma13 = 1, so rates are in units of gamma13
and times in units of 1/gamma13.
"""

from lambdapair.rddi import (
    GeometryConfig,
    RDDICouplings,
    SystemConfig,
    coupling_f,
    coupling_g,
    couplings_for_pair,
)
from lambdapair.hilbert import dicke_state, fidelity, number_op, transition_op
from lambdapair.dynamics import (
    Constant,
    DriveSpec,
    Gaussian,
    JitterSpec,
    Liouvillian,
    Rectangular,
    TransitionDrive,
    assemble_liouvillian,
    build_hamiltonian,
)
from lambdapair.solvers import (
    DegenerateSteadyStateError,
    IntegratorConfig,
    SolverError,
    Trajectory,
    expm_propagate,
    propagate_density,
    propagate_state,
    steady_state,
)
from lambdapair.schemes import (
    PRESETS,
    RunResult,
    SchemePreset,
    make_preset,
    resonance_table,
    run_preset,
    run_pumping,
    run_raman,
    run_stirap,
    sweep,
)

__version__ = "0.1.0"

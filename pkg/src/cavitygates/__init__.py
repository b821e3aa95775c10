"""Simulation of multiphoton cavity-QED gates on dual-rail photonic qubits.

A single multilevel atom crosses a multimode cavity; far-detuned
intermediate levels are eliminated to give effective couplings between
logical photon states.  The package builds the full interaction-picture
Hamiltonians, reduces them, propagates them exactly and scores the
resulting gates.
"""

from .dynamics import (
    MeasurementOutcome,
    Propagator,
    StateVector,
    analytic_three_level,
    analytic_two_level,
    evolve,
    fidelity,
    overlap,
    project_atom,
)
from .effective import (
    EffectiveModel,
    Partition,
    Resonance,
    closed_form_params,
    iswap_exact_params,
    reduce_preset,
    schur_reduce,
    solve_resonance,
)
from .errors import (
    CavityGatesError,
    ConfigurationError,
    CutoffError,
    DegenerateError,
    DimensionCapError,
    IllConditionedPartitionError,
    NumericalError,
    SpecError,
    StructureError,
    ValidationError,
)
from .gates import (
    GateRun,
    TruthTable,
    decode,
    encode,
    interaction_time,
    reference_params,
    run_gate,
    truth_table,
    zrot_phase,
)
from .hamiltonian import (
    GATES,
    OperatorMatrix,
    build_hamiltonian,
    detuning_chain,
    excitation_operator,
    preset_hamiltonian,
    preset_spec,
)
from .hilbert import Basis, BasisState, enumerate_basis, index_of, total_excitation
from .system import CLASSICAL, Coupling, Diagonal, Mode, SystemSpec

__version__ = "0.1.0"

"""Exact simulation of the labeling dualism of two entangled identical particles."""

from .bell import (
    BellSettings,
    ChshResult,
    PseudoSpinSetting,
    bell_expectation,
    chsh_optimal,
    correlation_matrix,
    correlator,
    sign_difference_report,
)
from .decoherence import (
    EnvironmentOverlap,
    ReducedDensityMatrix,
    chsh_from_dm,
    dephase_dual_form,
    sweep_to_csv,
    sweep_transition,
)
from .dual import (
    LabeledBipartiteState,
    TwoSpeciesState,
    attempt_relabel_by_B_nip,
    nip_epr_state,
    relabel_by_A,
    relabel_by_B,
    round_trip,
)
from .errors import *  # noqa: F401,F403
from .fock import (
    MODES,
    FirstQuantizedState,
    Mode,
    Statistics,
    TwoParticleState,
    VariableSpec,
    apply_pair_normal_ordered,
    build_epr_state,
    inner_product,
    photonic_spec,
    to_first_quantized,
)
from .optics import (
    BeamSplitterElement,
    CoincidenceRecord,
    RoutingConvention,
    estimate_chsh,
    route_through_pbs,
    sample_coincidences,
    setting_to_beamsplitter,
)

__version__ = "0.1.0"

"""Super-bunching of n photons at a single-mode bottleneck.

Builds the linearly polarized n-photon input, merges it into one line with
a beam-splitter cascade, post-selects, and evaluates the polarization and
entanglement statistics of the resulting circular cat state.
"""

from .fock import (
    FockState,
    ModeId,
    Pol,
    ProductPhotonState,
    equivalent,
    expand_product,
    inner_product,
    norm_sq,
    normalize,
    tensor,
)
from .optics import (
    BeamSplitter,
    CascadeSpec,
    ModeMap,
    apply_mode_map,
    beam_splitter_map,
    build_input,
    compose,
    merge_cascade,
    split_cascade,
    transform_state,
)
from .postselect import (
    Constraint,
    PostSelectionRule,
    bottleneck_output,
    closed_form_output,
    closed_form_probability,
    project,
)
from .polarization import (
    PolarDistribution,
    circular_distribution,
    linear_basis_map,
    linear_distribution,
    rotation_symmetry_defect,
    stokes_expectations,
)
from .mismatch import (
    MismatchScenario,
    error_circular_distribution,
    error_hv_distribution,
    mismatch_output,
    mixed_circular_distribution,
)
from .entanglement import PureEnsemble, ghz_fraction, ghz_state, redistribute, witness_passes
from .circuit import CircuitSpec, builtin_circuit, parse_circuit, serialize

__version__ = "0.1.0"

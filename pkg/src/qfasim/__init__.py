"""Quantum finite automata under strict cutpoints: simulation of the four
models, linearization to generalized automata, stochasticization to
probabilistic automata, prepare-test witness constructions, and sign-rank
certificates."""

__version__ = "0.1.0"

from .automata import (
    EXACT_MODE,
    FLOAT_MODE,
    GFA,
    MOQFA,
    PFA,
    QCFA,
    CutpointSpec,
    Membership,
    acceptance_grid,
    evaluate,
    evaluate_gfa,
    evaluate_moqfa,
    evaluate_pfa,
    evaluate_qcfa,
    member,
)
from .linearize import channel_transfer_matrix, hermitian_coords, moqfa_to_gfa, qcfa_to_gfa
from .opcore import (
    TAU_EQ,
    TAU_HERM,
    TAU_PSD,
    TAU_RANK,
    KrausChannel,
    apply_channel,
    choi_matrix,
    eigh,
    expm,
    hermitian_basis,
    hs_inner,
    operator_norm,
)
from .serialize import automaton_from_json, automaton_to_json, load_automaton, save_automaton
from .signrank import (
    ForsterCertificate,
    RealizationMatrix,
    SignMatrix,
    complete_shattering,
    forster_bound,
    numerical_rank,
    orthant_certificate,
    pfa_realization,
    quantum_realization,
    sign_matrix,
    spectral_norm,
)
from .stochasticize import AgreementReport, ConversionReport, gfa_to_pfa, verify_sign_agreement
from .witnesses import (
    EtaMode,
    MoqfaWitnessBundle,
    QcfaWitnessBundle,
    build_moqfa_witness,
    build_qcfa_witness,
    effect_channel,
    orbit_jacobian,
    prepare_unitary,
    replacement_channel,
    verify_moqfa_expansion,
    verify_shattering,
)

__all__ = [name for name in dir() if not name.startswith("_")]
